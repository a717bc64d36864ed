from __future__ import annotations

import io
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from derivlab.algebra import dual_numbers, group_array, matmul, prime_field
from derivlab.deformation import ResidualRep, batch_inverse, build_quasi_hom, conjugate_lift, enumerate_lifts, quasi_hom_check
from derivlab.errors import Ambiguous, BudgetExceeded, NoMatch
from derivlab.galois import FiniteGroup, Representation
from derivlab.pseudochar import (
    conj_equivalent,
    from_quasi_lift,
    reconstruct,
    reflection_check,
    verify_axioms,
    words,
)

F5E = dual_numbers(5)


def s3_residual():
    return ResidualRep(FiniteGroup.symmetric3(), prime_field(5), [[[0, 1], [1, 0]], [[0, 4], [1, 4]]])


_LIFTS: list = []


def s3_lifts():
    if not _LIFTS:
        _LIFTS.extend(enumerate_lifts(s3_residual(), F5E))
    return _LIFTS


def z10_quasi_lift():
    z = FiniteGroup.cyclic(10)
    sigma = Representation.from_generators(z, F5E, [F5E.lift_residue_matrix([[4, 0], [0, 4]])])
    phi = Representation.from_generators(z, F5E, [F5E.lift_residue_matrix([[1, 1], [0, 1]])])
    g = F5E.lift_residue_matrix(np.eye(2, dtype=np.int64))
    g[1, 0, 1] = 1
    q, is_hom = build_quasi_hom(sigma, phi, g)
    assert not is_hom
    return q


def test_word_counts_are_shortlex():
    assert len(words(3, 6)) == sum(3**k for k in range(7))
    assert words(2, 2) == [(), (1,), (2,), (1, 1), (1, 2), (2, 1), (2, 2)]


def test_homomorphism_table_is_trace_of_evaluated_word():
    lift = s3_lifts()[11]
    rho = lift.representation(FiniteGroup.symmetric3())
    t = from_quasi_lift(rho, M=3, L=4)
    g = rho.group
    rng = np.random.default_rng(1)
    for _ in range(40):
        m = int(rng.integers(1, 4))
        tup = [int(x) for x in rng.integers(0, 6, m)]
        w = words(m, 4)[int(rng.integers(len(words(m, 4))))]
        mat = F5E.scalar_matrix(2)
        for a in w:
            mat = matmul(F5E, mat, rho.mats[tup[a - 1]])
        assert np.array_equal(t.value(w, tup), np.einsum("iid->d", mat) % 5)
    assert np.array_equal(t.values[1][0], np.broadcast_to(F5E.scalar(2), t.values[1][0].shape))


def test_reduction_is_residual_table():
    lift = s3_lifts()[40]
    t = from_quasi_lift(lift, M=2, L=3, group=FiniteGroup.symmetric3())
    bar = from_quasi_lift(s3_residual().rep, M=2, L=3)
    assert t.reduce().same_values(bar)


def test_axioms_pass_for_homomorphisms():
    for lift in s3_lifts()[::31]:
        rep = verify_axioms(from_quasi_lift(lift, M=3, L=4, group=FiniteGroup.symmetric3()))
        assert rep.ok and rep.relabel_checks > 0 and rep.product_checks > 0


def test_axioms_for_a_character():
    z = FiniteGroup.cyclic(4)
    chi = Representation.from_generators(z, F5E, [F5E.lift_residue_matrix([[2]])])
    assert verify_axioms(from_quasi_lift(chi, M=3, L=5)).ok


def test_corrupted_entry_is_reported():
    t = from_quasi_lift(s3_lifts()[0], M=2, L=3, group=FiniteGroup.symmetric3())
    t.values[2][4, 13] = (t.values[2][4, 13] + np.array([0, 1])) % 5
    rep = verify_axioms(t)
    assert not rep.ok
    v = rep.violations[0]
    assert {"axiom", "word", "tuple"} <= set(v)
    assert v["axiom"] == "relabel" and "zeta" in v


def test_quasi_lift_tables_satisfy_axioms():
    assert verify_axioms(from_quasi_lift(z10_quasi_lift(), M=3, L=4)).ok


def test_kernel_conjugate_inputs_give_identical_tables():
    g = FiniteGroup.symmetric3()
    ker = group_array("kernelgln", F5E, 2)
    lift = s3_lifts()[5]
    base = from_quasi_lift(lift, M=2, L=4, group=g)
    for u in ker[::97]:
        assert from_quasi_lift(conjugate_lift(lift, u), M=2, L=4, group=g).same_values(base)
    q = z10_quasi_lift()
    base_q = from_quasi_lift(q, M=2, L=4)
    u, ui = ker[300], batch_inverse(F5E, ker[300][None])[0]
    conj = matmul(F5E, matmul(F5E, u[None], q.rho), ui[None])
    assert quasi_hom_check(q.group, F5E, conj).is_quasi
    assert from_quasi_lift(Representation(q.group, F5E, conj, check=False), M=2, L=4).same_values(base_q)


def test_budget():
    with pytest.raises(BudgetExceeded):
        from_quasi_lift(s3_lifts()[0], M=3, L=6, group=FiniteGroup.symmetric3(), budget=1000)


# -- reflection -----------------------------------------------------------------------


def test_reflection_passes_for_homomorphisms():
    for lift in s3_lifts()[::50]:
        rep = reflection_check(from_quasi_lift(lift, M=3, L=4, group=FiniteGroup.symmetric3()))
        assert rep.equivariant and rep.verdict == "Pass"


def test_reflection_on_non_homomorphism_is_never_a_pass():
    q = z10_quasi_lift()
    t = from_quasi_lift(q, M=3, L=4)
    rep = reflection_check(t)
    assert rep.verdict in ("Fail", "Inconclusive")
    # the trace table of this quasi-lift is that of genuine homomorphisms, so no word can separate it
    r = ResidualRep(q.group, prime_field(5), [[[4, 0], [0, 4]]])
    small = from_quasi_lift(q, M=2, L=3)
    assert any(from_quasi_lift(l, M=2, L=3, group=q.group).same_values(small) for l in enumerate_lifts(r, F5E))


def test_fault_injected_table_breaks_reflection():
    t = from_quasi_lift(s3_lifts()[0], M=2, L=2, group=FiniteGroup.symmetric3())
    t.values[2][4, 1] = (t.values[2][4, 1] + np.array([1, 0])) % 5  # word (1, 2) at tuple (0, 1)
    rep = reflection_check(t)
    assert not rep.equivariant and rep.verdict == "Fail"
    assert rep.witness["m"] == 2


# -- conjugacy oracle ----------------------------------------------------------------


def test_conj_equivalent():
    gens = s3_lifts()[17].gens
    same = conj_equivalent(gens, gens, F5E)
    assert same.equivalent and np.array_equal(same.conjugator, F5E.scalar_matrix(2))
    ker = group_array("kernelgln", F5E, 2)
    u = ker[123]
    moved = matmul(F5E, matmul(F5E, u[None], gens), batch_inverse(F5E, u[None]))
    w = conj_equivalent(gens, moved, F5E)
    assert w.equivalent
    c, ci = w.conjugator, batch_inverse(F5E, w.conjugator[None])
    assert np.array_equal(matmul(F5E, matmul(F5E, c[None], gens), ci), moved)
    # different single-letter trace
    other = gens.copy()
    other[1, 0, 0, 1] = (other[1, 0, 0, 1] + 1) % 5
    assert not np.array_equal(np.einsum("iid->d", other[1]) % 5, np.einsum("iid->d", gens[1]) % 5)
    assert not conj_equivalent(gens, other, F5E).equivalent


# -- reconstruction ------------------------------------------------------------------------


def test_reconstruction_round_trip():
    g = FiniteGroup.symmetric3()
    r = s3_residual()
    lift = s3_lifts()[77]
    t = from_quasi_lift(lift, M=3, L=4, group=g)
    rec = reconstruct(t, r)
    assert rec.quasi_ok and rec.table_matches
    assert conj_equivalent(rec.table, lift.representation(g).mats, F5E).equivalent


def test_reconstruction_of_trivial_group():
    g = FiniteGroup.cyclic(1)
    r = ResidualRep(g, prime_field(3), [[[1]]])
    rho = Representation.from_generators(g, dual_numbers(3), [dual_numbers(3).scalar_matrix(1)])
    rec = reconstruct(from_quasi_lift(rho, M=2, L=2), r)
    assert np.array_equal(rec.table, rho.mats)


def test_zero_word_length_is_ambiguous():
    t = from_quasi_lift(s3_lifts()[0], M=3, L=0, group=FiniteGroup.symmetric3())
    with pytest.raises(Ambiguous):
        reconstruct(t, s3_residual())


def test_unrealizable_table_has_no_match():
    t = from_quasi_lift(s3_lifts()[0], M=3, L=3, group=FiniteGroup.symmetric3())
    t.values[2][1] = (t.values[2][1] + np.array([0, 1])) % 5  # trace of letter 1 shifted
    with pytest.raises(NoMatch):
        reconstruct(t, s3_residual())


def test_reconstruction_needs_scalar_commutant():
    g = FiniteGroup.cyclic(3)
    r = ResidualRep(g, prime_field(3), [[[1, 0], [0, 1]]])
    rho = Representation.from_generators(g, dual_numbers(3), [dual_numbers(3).scalar_matrix(2)])
    with pytest.raises(ValueError):
        reconstruct(from_quasi_lift(rho, M=2, L=2), r)


def test_streaming_matches_entries():
    t = from_quasi_lift(s3_lifts()[3], M=1, L=2, group=FiniteGroup.symmetric3())
    buf = io.StringIO()
    t.stream_json(buf)
    lines = buf.getvalue().splitlines()
    assert json.loads(lines[0])["L"] == 2
    assert len(lines) - 1 == 6 * len(words(1, 2))
    entry = json.loads(lines[5])
    assert entry["value"] == t.value(entry["word"], entry["tuple"]).tolist()


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 124), st.integers(0, 624))
def test_conjugation_invariance_property(i, k):
    g = FiniteGroup.symmetric3()
    lift = s3_lifts()[i]
    u = group_array("kernelgln", F5E, 2)[k]
    a = from_quasi_lift(lift, M=2, L=3, group=g)
    b = from_quasi_lift(conjugate_lift(lift, u), M=2, L=3, group=g)
    assert a.same_values(b) and verify_axioms(a).ok and reflection_check(a).verdict == "Pass"

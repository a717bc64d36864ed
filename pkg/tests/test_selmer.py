from __future__ import annotations

import itertools

import numpy as np
import pytest

from derivlab.algebra import prime_field
from derivlab.complexes import cohomology
from derivlab.errors import MissingInertia, NotBorelValued
from derivlab.galois import Character, FiniteGroup, GModule, Representation, adjoint_module, group_cohomology
from derivlab.selmer import (
    LocalDatum,
    borel_datum,
    check_regularity,
    find_gbar,
    h1_ord_tilde,
    local_condition,
    ordinary_complex,
    ordinary_mu_complex,
    strict_local_condition,
    verify_star,
)


def unipotent_z3():
    f3 = prime_field(3)
    g = FiniteGroup.cyclic(3)
    return g, Representation.from_generators(g, f3, [f3.lift_residue_matrix([[1, 1], [0, 1]])])


def s3_standard(p):
    f = prime_field(p)
    g = FiniteGroup.symmetric3()
    s = f.lift_residue_matrix([[0, 1], [1, 0]])
    t = f.lift_residue_matrix([[0, p - 1], [1, p - 1]])
    return g, Representation.from_generators(g, f, [s, t])


def test_trivial_decomposition_group_gives_zero_condition():
    g, rho = s3_standard(3)
    cond = local_condition(g, adjoint_module(rho), borel_datum(rho, "v", [0]))
    assert cond.dim_L == 0


def test_full_condition_is_all_of_h1():
    g, rho = s3_standard(3)
    sub = g.closure([g.generators[1]])
    dat = borel_datum(rho, "v", sub, find_gbar(rho, sub), sub_flavor="gl")
    cond = local_condition(g, adjoint_module(rho), dat)
    sg, emb = g.subgroup(sub)
    assert cond.dim_L == group_cohomology(sg, adjoint_module(rho).restrict(emb, sg), 1).dim


@pytest.mark.parametrize("builder", [unipotent_z3, lambda: s3_standard(3)])
def test_no_places_gives_plain_cohomology(builder):
    g, rho = builder()
    m = adjoint_module(rho)
    rep = verify_star(g, [], m)
    assert rep.h_ord == rep.h_global
    assert rep.all_exact


def test_strict_condition_vanishes_for_torus_with_full_inertia():
    f3 = prime_field(3)
    g = FiniteGroup.cyclic(3)
    rho = Representation.from_generators(g, f3, [f3.scalar_matrix(2)])
    t = adjoint_module(rho, "torus")
    dat = borel_datum(rho, "v", list(range(3)), inertia=list(range(3)), ambient="torus", sub_flavor="torus")
    assert local_condition(g, t, dat).dim_L == 2
    assert strict_local_condition(g, t, dat).dim_L == 0


def test_strict_needs_inertia():
    g, rho = unipotent_z3()
    dat = borel_datum(rho, "v", list(range(3)))
    with pytest.raises(MissingInertia):
        ordinary_mu_complex(g, [dat], adjoint_module(rho))


def test_not_borel_valued():
    g, rho = s3_standard(5)
    with pytest.raises(NotBorelValued):
        borel_datum(rho, "v", list(range(6)))
    assert find_gbar(rho, list(range(6))) is None


def test_coprime_order_ordinary_cohomology_vanishes():
    g, rho = s3_standard(5)
    sub = g.closure([g.generators[0]])
    dat = borel_datum(rho, "v", sub, find_gbar(rho, sub), inertia=sub)
    m = adjoint_module(rho)
    for strict in (False, True):
        rep = verify_star(g, [dat], m, strict=strict)
        assert rep.h_ord[1:] == [0, 0, 0]
        assert rep.all_exact


def test_conditions_grow_with_the_submodule():
    g, rho = s3_standard(3)
    sub = g.closure([g.generators[1]])
    gb = find_gbar(rho, sub)
    m = adjoint_module(rho)
    dims = []
    for flavor in ("nilpotent", "borel", "gl"):
        rep = verify_star(g, [borel_datum(rho, "v", sub, gb, sub_flavor=flavor)], m)
        assert rep.all_exact
        dims.append(rep.h_ord[1])
    assert dims == sorted(dims)


def test_strict_at_most_ordinary_and_greenberg_wiles():
    g, rho = s3_standard(3)
    m = adjoint_module(rho)
    for gens in ([1], [0]):
        sub = g.closure([g.generators[k] for k in gens])
        gb = find_gbar(rho, sub)
        if gb is None:
            continue
        dat = borel_datum(rho, "v", sub, gb, inertia=sub)
        ordinary = verify_star(g, [dat], m)
        strict = verify_star(g, [dat], m, strict=True)
        assert strict.h_ord[1] <= ordinary.h_ord[1]
        assert ordinary.greenberg_wiles and strict.greenberg_wiles
        assert h1_ord_tilde(g, [dat], m) == ordinary.h_ord[1]


def test_cone_cohomology_matches_report():
    g, rho = s3_standard(3)
    sub = g.closure([g.generators[1]])
    dat = borel_datum(rho, "v", sub, find_gbar(rho, sub), inertia=[0])
    m = adjoint_module(rho)
    x = ordinary_complex(g, [dat], m)
    rep = verify_star(g, [dat], m)
    assert [cohomology(x, i).dim for i in range(4)] == rep.h_ord


def _crossed_homs_cyclic(m: GModule, gen: int):
    """All cocycles of a cyclic group, from the value at the generator."""
    grp, p, r = m.group, m.p, m.rank
    order = grp.order
    powers = [grp.identity]
    for _ in range(order - 1):
        powers.append(grp.mul(powers[-1], gen))
    out = []
    for v in itertools.product(range(p), repeat=r):
        v = np.array(v, dtype=np.int64)
        z = {grp.identity: np.zeros(r, dtype=np.int64)}
        acc = np.zeros(r, dtype=np.int64)
        for k in range(1, order + 1):
            acc = (acc + m.action[powers[k - 1]] @ v) % p
            if k < order:
                z[powers[k]] = acc.copy()
        if acc.any():
            continue  # z(g^order) must vanish
        out.append(np.concatenate([z[x] for x in range(order)]))
    return out


def test_h1_ord_matches_brute_force_selmer_count():
    g, rho = unipotent_z3()
    m = adjoint_module(rho)
    dat = borel_datum(rho, "v", list(range(3)))
    b = dat.sub
    zg = _crossed_homs_cyclic(m, 1)
    zb = _crossed_homs_cyclic(b, 1)
    cob = {tuple(np.concatenate([(m.action[x] @ v - v) % 3 for x in range(3)])) for v in itertools.product(range(3), repeat=4)}
    iota = np.kron(np.eye(3, dtype=np.int64), dat.iota)
    allowed = {tuple((iota @ z + np.array(c)) % 3) for z in zb for c in cob}
    selmer = sum(tuple(z) in allowed for z in zg)
    rep = verify_star(g, [dat], m)
    assert selmer == 3 ** rep.h_ord[1] * len(cob)
    assert rep.all_exact


def test_two_places_all_exact():
    g, rho = s3_standard(3)
    m = adjoint_module(rho)
    places = []
    for label, gens in (("a", [1]), ("b", [0])):
        sub = g.closure([g.generators[k] for k in gens])
        places.append(borel_datum(rho, label, sub, find_gbar(rho, sub), inertia=sub))
    rep = verify_star(g, places, m)
    assert rep.all_exact and rep.h0_isomorphism and rep.alternating_sum == 0
    assert set(rep.dim_L) == {"a", "b"}


def test_non_equivariant_embedding_rejected():
    g, rho = unipotent_z3()
    m = adjoint_module(rho)
    sub = GModule.trivial(g, 3, 1, 1)
    bad = LocalDatum("v", [0, 1, 2], sub, np.array([[0], [0], [1], [0]]))
    with pytest.raises(NotBorelValued):
        local_condition(g, m, bad)


def test_regularity():
    f5 = prime_field(5)
    g = FiniteGroup.cyclic(4)
    omega = Character.from_generators(g, 5, 1, [2])
    diag = Representation.from_generators(g, f5, [f5.lift_residue_matrix([[2, 0], [0, 1]])])
    dat = borel_datum(diag, "v", list(range(4)))
    rep = check_regularity(dat, diag, omega)
    assert rep.reg and not rep.reg_star and rep.reg_star_witnesses == [(1, 2)]
    scal = Representation.from_generators(g, f5, [f5.scalar_matrix(2, 3)])
    rep = check_regularity(borel_datum(scal, "v", list(range(4))), scal, omega)
    assert not rep.reg and rep.reg_witnesses == [(1, 2)] and rep.reg_star
    gs, rho = s3_standard(5)
    fake = LocalDatum("v", list(range(6)), GModule.trivial(gs, 5), np.zeros((4, 1), dtype=np.int64))
    with pytest.raises(NotBorelValued):
        check_regularity(fake, rho, Character.trivial(gs, 5))

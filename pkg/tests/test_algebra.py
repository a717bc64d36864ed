from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from derivlab.algebra import (
    FiniteLocalRing,
    RMatrix,
    dual_numbers,
    enumerate_small_group,
    mat_inverse,
    prime_field,
    ring_from_spec,
    truncated_poly,
    z_mod_pe,
)
from derivlab.errors import BudgetExceeded, NotAssociative, NotCommutative, NoUnit, NotInvertible, NotLocal, RingError
from derivlab.linalg import inverse_zpe, snf_zpe


def _brute_units(ring):
    # x is a unit iff some y has x*y == 1
    els = ring.elements
    one = ring.index(ring.one)
    count = 0
    for x in els:
        prods = ring.indices(ring.times(x[None, :], els))
        count += bool(np.any(prods == one))
    return count


def test_dual_numbers_f3_has_nine_elements_six_units():
    spec = {"p": 3, "e": 1, "rank": 2, "mul": [[[1, 0], [0, 1]], [[0, 1], [0, 0]]], "one": [1, 0]}
    ring = ring_from_spec(spec)
    assert ring.size == 9
    assert ring.n_units == 6
    assert _brute_units(ring) == 6
    assert ring == dual_numbers(3)


def test_z9_is_local_with_residue_f3():
    ring = ring_from_spec({"p": 3, "e": 2, "rank": 1, "mul": [[[1]]], "one": [1]})
    assert ring.size == 9
    assert ring.n_units == 6
    assert [int(ring.residue(np.array([x]))) for x in range(9)] == [x % 3 for x in range(9)]
    assert not ring.is_field


def test_product_ring_rejected_as_not_local():
    mul = np.zeros((2, 2, 2), dtype=int)
    mul[0, 0, 0] = 1
    mul[1, 1, 1] = 1
    with pytest.raises(NotLocal):
        FiniteLocalRing(3, 1, mul, [1, 1])


def test_structure_constant_errors():
    mul = dual_numbers(3).mul.copy()
    bad = mul.copy()
    bad[0, 1] = [1, 1]
    with pytest.raises(NotCommutative):
        FiniteLocalRing(3, 1, bad, [1, 0])
    with pytest.raises(NoUnit):
        FiniteLocalRing(3, 1, mul, [0, 1])
    # e1*e1 = e0 and e0 = 1 gives F_3[x]/(x^2-1), which splits as F_3 x F_3
    split = mul.copy()
    split[1, 1] = [1, 0]
    with pytest.raises(NotLocal):
        FiniteLocalRing(3, 1, split, [1, 0])
    with pytest.raises(RingError):
        FiniteLocalRing(2, 1, [[[1]]], [1])


def test_nonassociative_constants_rejected():
    # a commutative unital table with e1*e1 = e2, e1*e2 = 0, e2*e2 = e2: (e1 e1) e2 != e1 (e1 e2)
    mul = np.zeros((3, 3, 3), dtype=int)
    for a in range(3):
        mul[0, a, a] = mul[a, 0, a] = 1
    mul[1, 1, 2] = 1
    mul[2, 2, 2] = 1
    with pytest.raises(NotAssociative):
        FiniteLocalRing(3, 1, mul, [1, 0, 0])


RINGS = [prime_field(3), dual_numbers(3), z_mod_pe(3, 2), truncated_poly(3, 3), prime_field(5), dual_numbers(5)]


@pytest.mark.parametrize("ring", RINGS, ids=repr)
def test_residue_is_multiplicative_exhaustively(ring):
    els = ring.elements
    prods = ring.times(els[:, None, :], els[None, :, :])
    lhs = ring.residue(prods)
    rhs = (ring.residue(els)[:, None] * ring.residue(els)[None, :]) % ring.p
    assert np.array_equal(lhs, rhs)


@pytest.mark.parametrize("ring", RINGS, ids=repr)
def test_units_match_brute_force_and_inverse(ring):
    assert ring.n_units == _brute_units(ring)
    for x in ring.elements[ring.unit_mask]:
        assert np.array_equal(ring.times(x, ring.inverse(x)), ring.one)


def test_mat_inverse_examples():
    ring = dual_numbers(3)
    eps = np.array([0, 1])
    ident = RMatrix.identity(ring, 2)
    assert mat_inverse(ident) == ident
    n = np.zeros((2, 2, 2), dtype=int)
    n[0, 1] = eps
    m = ident + RMatrix(ring, n)
    assert mat_inverse(m) == ident - RMatrix(ring, n)
    sing = np.zeros((2, 2, 2), dtype=int)
    sing[0, 0] = [1, 0]
    sing[1, 1] = eps
    with pytest.raises(NotInvertible):
        mat_inverse(RMatrix(ring, sing))


def test_group_enumeration_sizes():
    assert len(enumerate_small_group("KernelGLn", dual_numbers(5), 2)) == 625
    assert len(enumerate_small_group("GLn", prime_field(3), 2)) == 48
    units = enumerate_small_group("Units", prime_field(3), 1)
    assert [u.entries.ravel().tolist() for u in units] == [[1], [2]]
    with pytest.raises(BudgetExceeded):
        enumerate_small_group("GLn", prime_field(5), 3, budget=1000)


@pytest.mark.parametrize("ring", RINGS, ids=repr)
def test_kernel_size_is_maximal_ideal_power(ring):
    kern = enumerate_small_group("KernelGLn", ring, 2)
    assert len(kern) == len(ring.maximal_ideal) ** 4
    keys = [k.key() for k in kern]
    assert keys == sorted(keys)


def test_gl2_order_oracle():
    # |GL_2(A)| = |GL_2(k)| * |m|^4
    ring = dual_numbers(3)
    assert len(enumerate_small_group("GLn", ring, 2)) == 48 * 81


def _check_snf(m, p, e):
    mod = p**e
    s = snf_zpe(m, p, e)
    assert np.array_equal((s.left @ np.asarray(m) @ s.right) % mod, s.diag)
    inverse_zpe(s.left, p, e)
    inverse_zpe(s.right, p, e)
    k = min(s.diag.shape)
    diag = [int(s.diag[i, i]) for i in range(k)]
    assert diag == [p**a % mod for a in s.exponents]
    assert list(s.exponents) == sorted(s.exponents)
    off = s.diag.copy()
    off[np.arange(k), np.arange(k)] = 0
    assert not off.any()
    return s


def test_snf_examples():
    assert _check_snf(np.eye(3, dtype=int), 3, 2).exponents == (0, 0, 0)
    assert _check_snf([[3, 0], [0, 1]], 3, 2).exponents == (0, 1)
    s = _check_snf([[3, 1], [0, 3]], 3, 2)
    assert s.exponents == (0, 2)
    assert s.diag.tolist() == [[1, 0], [0, 0]]


@settings(max_examples=60, deadline=None)
@given(
    st.sampled_from([(3, 1), (3, 2), (3, 3), (5, 2)]),
    st.integers(1, 4),
    st.integers(1, 4),
    st.data(),
)
def test_snf_property(pe, r, c, data):
    p, e = pe
    m = np.array(data.draw(st.lists(st.integers(0, p**e - 1), min_size=r * c, max_size=r * c))).reshape(r, c)
    _check_snf(m, p, e)


def test_associativity_exhaustive_on_elements():
    ring = truncated_poly(3, 3)
    els = ring.elements[:: 3]
    for a, b, c in itertools.product(els[:6], repeat=3):
        assert np.array_equal(ring.times(ring.times(a, b), c), ring.times(a, ring.times(b, c)))

from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from derivlab.algebra import dual_numbers, prime_field
from derivlab.complexes import ChainComplex, cohomology, homology
from derivlab.errors import SimplicialIdentityError
from derivlab.galois import FiniteGroup, GModule, cochain_complex
from derivlab.simplicial import (
    SimplicialModule,
    TModule,
    _coords,
    cosimplicial_group_complex,
    dk,
    homotopy_groups,
    homotopy_ring,
    normalized,
    square_zero_extension,
    surjections,
)
from test_complexes import random_complex


def _brute_pi(m: SimplicialModule, n: int) -> int:
    """|pi_n| from Moore's definition: all-faces cycles modulo d_{n+1} of spheres."""
    mod = m.mod

    def vecs(r):
        return np.array(list(itertools.product(range(mod), repeat=r)), dtype=np.int64).reshape(-1, r)

    xs = vecs(m.ranks[n])
    if n > 0:
        keep = np.all([~np.any((xs @ m.d(n, i).T) % mod, axis=1) for i in range(n + 1)], axis=0)
        cycles = xs[keep]
    else:
        cycles = xs
    ys = vecs(m.ranks[n + 1])
    keep = np.all([~np.any((ys @ m.d(n + 1, i).T) % mod, axis=1) for i in range(n + 1)], axis=0)
    bounds = {tuple(v) for v in (ys[keep] @ m.d(n + 1, n + 1).T) % mod}
    return len(cycles) // len(bounds)


def test_surjection_counts():
    assert [len(surjections(n)) for n in range(5)] == [1, 2, 4, 8, 16]
    assert surjections(2, 1) == ((0, 0, 1), (0, 1, 1))


def test_constant_module_normalizes_to_degree_zero():
    m = SimplicialModule.constant(3, 1, 2, 3)
    n = normalized(m)
    assert n.ranks == [2, 0, 0, 0]
    pis = homotopy_groups(m)
    assert [h.group.dim for h in pis] == [2, 0, 0, 0]
    assert [h.reliable for h in pis] == [True, True, True, False]


def test_dk_of_point_is_constant():
    c = ChainComplex(3, 1, 0, [1])
    assert dk(c, 3) == SimplicialModule.constant(3, 1, 1, 3)


def test_dk_level_two_of_degree_one_class():
    c = ChainComplex(3, 1, 0, [0, 1])
    assert dk(c, 2).ranks == [0, 1, 2]


def test_dk_of_shifted_class_has_pi2():
    c = ChainComplex(3, 1, 0, [0, 0, 1])
    pis = homotopy_groups(dk(c, 3))
    assert [h.group.dim for h in pis[:3]] == [0, 0, 1]


def test_broken_identity_rejected():
    m = dk(ChainComplex(3, 1, 0, [1, 1], {1: [[1]]}), 2)
    faces = dict(m.faces)
    faces[(2, 0)] = (faces[(2, 0)] + 1) % 3
    with pytest.raises(SimplicialIdentityError):
        SimplicialModule(3, 1, m.ranks, faces, m.degens)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5]), st.lists(st.integers(0, 3), min_size=1, max_size=6), st.integers(0, 10**6))
def test_dold_kan_roundtrip_fields(p, ranks, seed):
    c = random_complex(np.random.default_rng(seed), p, 1, 0, ranks)
    m = dk(c)
    assert normalized(m) == c
    for h in homotopy_groups(m):
        assert h.group == homology(c, h.degree) or not h.reliable


@pytest.mark.parametrize("seed", range(6))
def test_dold_kan_roundtrip_z9(seed):
    c = random_complex(np.random.default_rng(seed), 3, 2, 0, [1, 2, 1, 1])
    m = dk(c)
    assert normalized(m) == c
    for h in homotopy_groups(m)[:-1]:
        assert h.group == homology(c, h.degree)


@pytest.mark.parametrize("seed", range(4))
def test_homotopy_matches_moore_brute_force(seed):
    rng = np.random.default_rng(seed)
    p, e = [(3, 1), (3, 2)][seed % 2]
    c = random_complex(rng, p, e, 0, [1, 1, 1])
    m = dk(c, 3)
    for n in range(3):
        assert homotopy_groups(m)[n].group.order == _brute_pi(m, n)


# -- homotopy rings -----------------------------------------------------------


@pytest.mark.parametrize("ring", [prime_field(3), dual_numbers(3)], ids=repr)
@pytest.mark.parametrize("j", [1, 2])
def test_square_zero_extension_homotopy(ring, j):
    a = square_zero_extension(ring, TModule.free(ring), j)
    pi = homotopy_ring(a)
    dims = [g.dim for g in pi.groups[: a.level]]
    expect = [0] * a.level
    expect[0] = ring.d
    expect[j] += ring.d
    assert dims == expect
    assert pi.pi0 == ring or pi.pi0.size == ring.size


def test_square_zero_j0_is_constant_ring():
    ring = dual_numbers(3)
    a = square_zero_extension(ring, TModule.residue_field(ring), 0, level=2)
    assert all(np.array_equal(f, np.eye(3, dtype=np.int64)) for f in a.module.faces.values())
    pi = homotopy_ring(a)
    assert [g.dim for g in pi.groups] == [3, 0, 0]


def test_pi1_squared_is_zero():
    ring = dual_numbers(3)
    pi = homotopy_ring(square_zero_extension(ring, TModule.free(ring), 1, level=3))
    assert not pi.product_table(1, 1).any()


@pytest.mark.parametrize("ring", [prime_field(3), dual_numbers(3)], ids=repr)
@pytest.mark.parametrize("j", [1, 2])
@pytest.mark.parametrize("module", ["free", "residue"])
def test_pi0_action_matches_module_action(ring, j, module):
    mod = TModule.free(ring) if module == "free" else TModule.residue_field(ring)
    a = square_zero_extension(ring, mod, j)
    pi = homotopy_ring(a)
    d, r = ring.d, mod.rank
    # the identity surjection [j] -> [j] is the last DK component
    offset = a.levels[j].d - r
    cols = []
    for x in np.eye(r, dtype=np.int64):
        elt = np.zeros(a.levels[j].d, dtype=np.int64)
        elt[offset:] = x
        ncoords = _coords(pi.inclusions[j], elt[:, None], 3, 1)[:, 0]
        cols.append(pi.bases[j].coords(ncoords))
    P = np.stack(cols, axis=1)
    for t in ring.elements:
        act = np.stack([pi.act_scalar(t, j, y) for y in np.eye(pi.dim(j), dtype=np.int64)], axis=1)
        assert np.array_equal((act @ P) % 3, (P @ mod.act(t)) % 3)


def test_graded_commutativity_samples():
    ring = dual_numbers(3)
    pi = homotopy_ring(square_zero_extension(ring, TModule.free(ring), 1, level=3))
    rng = np.random.default_rng(0)
    for i, j in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        for _ in range(5):
            x = rng.integers(0, 3, pi.dim(i))
            y = rng.integers(0, 3, pi.dim(j))
            lhs = pi.product(i, x, j, y)
            rhs = ((-1) ** (i * j) * pi.product(j, y, i, x)) % 3
            assert np.array_equal(lhs, rhs)


# -- totalization ----------------------------------------------------------------


def test_trivial_group_totalization():
    g = FiniteGroup(np.zeros((1, 1), dtype=int))
    m = GModule.trivial(g, 3, 1, 2)
    c = cosimplicial_group_complex(g, m, 4)
    assert [cohomology(c, i).dim for i in range(4)] == [2, 0, 0, 0]


def test_z3_trivial_totalization():
    g = FiniteGroup.cyclic(3)
    c = cosimplicial_group_complex(g, GModule.trivial(g, 3), 4)
    assert [cohomology(c, i).dim for i in range(4)] == [1, 1, 1, 1]


GROUPS = [FiniteGroup.cyclic(3), FiniteGroup.cyclic(4), FiniteGroup.symmetric3(), FiniteGroup.dihedral(4)]


@pytest.mark.parametrize("group", GROUPS, ids=repr)
def test_totalization_equals_group_cochains(group):
    for mod in (GModule.trivial(group, 5, 1, 2), _regular_module(group, 5)):
        a = cosimplicial_group_complex(group, mod, 3)
        b = cochain_complex(group, mod, 3)
        for n in range(3):
            assert np.array_equal(a.d(n), b.d(n))
        raw = cosimplicial_group_complex(group, mod, 3, raw=True)
        assert [cohomology(raw, i).dim for i in range(3)] == [cohomology(b, i).dim for i in range(3)]


def _regular_module(group, p):
    act = np.zeros((group.order, group.order, group.order), dtype=np.int64)
    for g in range(group.order):
        for h in range(group.order):
            act[g, group.table[g, h], h] = 1
    return GModule(group, p, 1, act)

"""Corpus generators and whole-pipeline checks shared by the CLI and the acceptance suite."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .algebra import FiniteLocalRing, dual_numbers, group_array, prime_field
from .complexes import ChainComplex, cohomology, homology
from .galois import FiniteGroup, GModule, Representation, adjoint_module, cochain_complex
from .linalg import nullspace_fp
from .selmer import LocalDatum, borel_datum, find_gbar, verify_star
from .simplicial import (
    TModule,
    _coords,
    cosimplicial_group_complex,
    dk,
    homotopy_groups,
    homotopy_ring,
    normalized,
    square_zero_extension,
)

# ---------------------------------------------------------------------------
# groups


def _table_from(elements: list, mul) -> np.ndarray:
    index = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    table = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            table[i, j] = index[mul(a, b)]
    return table


def semidirect_cyclic(n: int, m: int, r: int, name: str) -> FiniteGroup:
    """Z/n x| Z/m with the generator of Z/m acting on Z/n by x -> r x (needs r^m = 1 mod n)."""
    elements = [(a, b) for b in range(m) for a in range(n)]

    def mul(x, y):
        return ((x[0] + pow(r, x[1], n) * y[0]) % n, (x[1] + y[1]) % m)

    table = _table_from(elements, mul)
    return FiniteGroup(table, [elements.index((1 % n, 0)), elements.index((0, 1 % m))], name=name)


def matrix_group(gens: list[np.ndarray], p: int, name: str) -> FiniteGroup:
    """Closure of invertible matrices over F_p, identity first."""
    n = gens[0].shape[0]
    ident = tuple(np.eye(n, dtype=np.int64).ravel())
    key = lambda m: tuple((m % p).ravel())  # noqa: E731
    elements = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        x = np.array(frontier.pop(), dtype=np.int64).reshape(n, n)
        for g in gens:
            y = key(x @ g)
            if y not in seen:
                seen.add(y)
                elements.append(y)
                frontier.append(y)

    def mul(a, b):
        return key(np.array(a).reshape(n, n) @ np.array(b).reshape(n, n))

    table = _table_from(elements, mul)
    return FiniteGroup(table, [elements.index(key(g)) for g in gens], name=name)


def small_groups() -> list[FiniteGroup]:
    """One group from each isomorphism class of order <= 12 (24 classes)."""
    c = FiniteGroup.cyclic
    prod = FiniteGroup.product
    out = [c(n) for n in range(1, 13)]
    out += [
        prod(c(2), c(2)),
        FiniteGroup.symmetric3(),
        prod(c(2), c(4)),
        prod(prod(c(2), c(2)), c(2)),
        FiniteGroup.dihedral(4),
        matrix_group([np.array([[0, 1], [2, 0]]), np.array([[1, 1], [1, 2]])], 3, "Q8"),
        prod(c(3), c(3)),
        semidirect_cyclic(5, 2, 4, "D5"),
        prod(c(2), c(6)),
        FiniteGroup.from_permutations([(1, 2, 0, 3), (1, 0, 3, 2)], name="A4"),
        semidirect_cyclic(6, 2, 5, "D6"),
        semidirect_cyclic(3, 4, 2, "Dic3"),
    ]
    return out


def coset_module(group: FiniteGroup, sub: list[int], p: int) -> GModule:
    """Permutation module F_p[G/H] for left cosets of the subgroup H."""
    cosets: list[frozenset] = []
    where = {}
    for g in range(group.order):
        if g in where:
            continue
        cos = frozenset(int(group.table[g, h]) for h in sub)
        for x in cos:
            where[x] = len(cosets)
        cosets.append(cos)
    reps = [min(c) for c in cosets]
    k = len(cosets)
    act = np.zeros((group.order, k, k), dtype=np.int64)
    for g in range(group.order):
        for i, r in enumerate(reps):
            act[g, where[int(group.table[g, r])], i] = 1
    return GModule(group, p, 1, act)


def small_modules(group: FiniteGroup, p: int, max_rank: int = 4) -> list[GModule]:
    """Trivial modules of rank 1 and max_rank, plus coset modules of index 2..max_rank."""
    mods = [GModule.trivial(group, p, 1, 1), GModule.trivial(group, p, 1, max_rank)]
    seen = set()
    for x in range(group.order):
        sub = group.closure([x])
        index = group.order // len(sub)
        if 2 <= index <= max_rank and tuple(sub) not in seen:
            seen.add(tuple(sub))
            mods.append(coset_module(group, sub, p))
    return mods


# ---------------------------------------------------------------------------
# complexes and simplicial checks


def random_complex(rng, p: int, e: int, lo: int, ranks) -> ChainComplex:
    """Random complex with d o d = 0; over fields each d lands in the kernel of the previous one."""
    mod = p**e
    diffs = {}
    prev = None
    for k in range(1, len(ranks)):
        m = rng.integers(0, mod, (ranks[k - 1], ranks[k]))
        if prev is not None and ranks[k - 1] and ranks[k]:
            if e == 1:
                ker = nullspace_fp(prev, p)
                m = (ker @ rng.integers(0, p, (ker.shape[1], ranks[k]))) % p if ker.shape[1] else np.zeros_like(m)
            elif np.any((prev @ m) % mod):
                m = np.zeros_like(m)
        diffs[lo + k] = m
        prev = m
    return ChainComplex(p, e, lo, ranks, diffs)


def dold_kan_corpus(count: int, seed: int = 0, primes=(3, 5), max_rank: int = 3, max_degree: int = 5) -> list[dict]:
    """N(DK(C)) == C and pi_i(DK(C)) == H_i(C) on random complexes."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        p = int(primes[k % len(primes)])
        top = int(rng.integers(0, max_degree + 1))
        ranks = [int(r) for r in rng.integers(0, max_rank + 1, top + 1)]
        c = random_complex(rng, p, 1, 0, ranks)
        m = dk(c)
        roundtrip = normalized(m) == c
        pis = homotopy_groups(m)
        homotopy = all(h.group == homology(c, h.degree) for h in pis)
        out.append({"index": k, "p": p, "ranks": ranks, "roundtrip": bool(roundtrip), "homotopy": bool(homotopy)})
    return out


def homotopy_ring_check(ring: FiniteLocalRing, j: int, samples: int = 5, seed: int = 0) -> dict:
    """pi_* of T (+) T[j]: degrees, pi_0 action, graded commutativity on samples."""
    mod = TModule.free(ring)
    a = square_zero_extension(ring, mod, j)
    pi = homotopy_ring(a)
    p = ring.p
    dims = [pi.dim(i) for i in range(a.level)]
    expect = [0] * a.level
    expect[0] = ring.d
    expect[j] += ring.d
    pi0_ok = pi.pi0 is not None and pi.pi0.size == ring.size
    # pi_0 action on pi_j against the module action, through the top DK component
    offset = a.levels[j].d - mod.rank
    cols = []
    for x in np.eye(mod.rank, dtype=np.int64):
        elt = np.zeros(a.levels[j].d, dtype=np.int64)
        elt[offset:] = x
        cols.append(pi.bases[j].coords(_coords(pi.inclusions[j], elt[:, None], p, 1)[:, 0]))
    P = np.stack(cols, axis=1)
    action_ok = True
    for t in ring.elements:
        act = np.stack([pi.act_scalar(t, j, y) for y in np.eye(pi.dim(j), dtype=np.int64)], axis=1)
        action_ok &= bool(np.array_equal((act @ P) % p, (P @ mod.act(t)) % p))
    rng = np.random.default_rng(seed)
    comm_ok = True
    pairs = [(x, y) for x in range(pi.reliable_top + 1) for y in range(pi.reliable_top + 1) if x + y <= pi.reliable_top]
    for x, y in pairs:
        if not pi.dim(x) or not pi.dim(y):
            continue
        for _ in range(samples):
            u = rng.integers(0, p, pi.dim(x))
            v = rng.integers(0, p, pi.dim(y))
            lhs = pi.product(x, u, y, v)
            rhs = ((-1) ** (x * y) * pi.product(y, v, x, u)) % p
            comm_ok &= bool(np.array_equal(lhs, rhs))
    return {
        "ring": repr(ring),
        "j": j,
        "dims": dims,
        "expected": expect,
        "degrees_ok": dims == expect,
        "pi0_ok": bool(pi0_ok),
        "action_ok": bool(action_ok),
        "commutative_ok": bool(comm_ok),
    }


def totalization_check(group: FiniteGroup, module: GModule, top: int = 3) -> dict:
    a = cosimplicial_group_complex(group, module, top)
    b = cochain_complex(group, module, top)
    equal = [bool(np.array_equal(a.d(n), b.d(n))) for n in range(top)]
    return {"group": repr(group), "rank": module.rank, "top": top, "equal": equal, "ok": all(equal)}


def cohomology_oracles(primes=(3, 5), top: int = 3) -> list[dict]:
    """H^i(Z/p, F_p) = 1, vanishing for coprime orders, H^0 = fixed points."""
    out = []
    for p in primes:
        g = FiniteGroup.cyclic(p)
        c = cochain_complex(g, GModule.trivial(g, p), top + 1)
        dims = [cohomology(c, i).dim for i in range(top + 1)]
        out.append({"case": f"Z/{p} trivial F_{p}", "dims": dims, "ok": dims == [1] * (top + 1)})
        for q in (2, 4) if p != 2 else (3,):
            if q % p == 0:
                continue
            h = FiniteGroup.cyclic(q)
            m = GModule.from_generators(h, p, 1, [np.array([[0, 1], [1, 0]]) if q % 2 == 0 else np.eye(2, dtype=np.int64)])
            cc = cochain_complex(h, m, top + 1)
            dims = [cohomology(cc, i).dim for i in range(top + 1)]
            fixed = m.fixed_points().shape[1]
            out.append({"case": f"Z/{q} over F_{p}", "dims": dims, "ok": dims[0] == fixed and not any(dims[1:])})
    return out


# ---------------------------------------------------------------------------
# randomized ordinary-complex scenarios


@dataclass
class StarScenario:
    group: FiniteGroup
    rho: Representation
    module: GModule
    datums: list[LocalDatum]
    strict: bool
    description: str


STAR_GROUPS = [
    FiniteGroup.cyclic(2),
    FiniteGroup.cyclic(3),
    FiniteGroup.cyclic(4),
    FiniteGroup.cyclic(5),
    FiniteGroup.cyclic(6),
    FiniteGroup.symmetric3(),
    FiniteGroup.product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(2)),
]


def random_representation(rng, group: FiniteGroup, p: int, n: int = 2, tries: int = 400) -> Representation:
    """A random homomorphism G -> GL_n(F_p) (trivial if sampling finds none)."""
    f = prime_field(p)
    pool = group_array("gln", f, n)
    for _ in range(tries):
        gens = [pool[int(rng.integers(len(pool)))] for _ in group.generators]
        try:
            return Representation.from_generators(group, f, gens)
        except Exception:
            continue
    return Representation.from_generators(group, f, [f.scalar_matrix(n)] * len(group.generators))


def star_scenarios(count: int, seed: int = 0, max_places: int = 2) -> list[StarScenario]:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        group = STAR_GROUPS[int(rng.integers(len(STAR_GROUPS)))]
        p = int(rng.choice([3, 5]))
        rho = random_representation(rng, group, p)
        ambient = "borel" if rng.random() < 0.4 else "gl"
        if ambient == "borel":
            gb = find_gbar(rho, list(range(group.order)))
            if gb is None:
                ambient = "gl"
            else:
                from .linalg import inverse_fp

                rho = rho.conjugate(rho.ring.lift_residue_matrix(inverse_fp(gb, p)))
        module = adjoint_module(rho, ambient)
        datums = []
        for k in range(int(rng.integers(0, max_places + 1))):
            x = int(rng.integers(group.order))
            sub = group.closure([x])
            gb = np.eye(2, dtype=np.int64) if ambient == "borel" else find_gbar(rho, sub)
            if gb is None:
                continue
            inertia = group.closure([sub[int(rng.integers(len(sub)))]]) if rng.random() < 0.7 else None
            flavor = "borel" if rng.random() < 0.75 else "nilpotent"
            datums.append(borel_datum(rho, f"v{k}", sub, gb, inertia=inertia, ambient=ambient, sub_flavor=flavor))
        strict = bool(datums) and all(d.inertia is not None and d.quotient is not None for d in datums) and rng.random() < 0.3
        desc = f"{group!r} p={p} {ambient} places={[d.elements for d in datums]} strict={strict}"
        out.append(StarScenario(group, rho, module, datums, strict, desc))
    return out


def star_corpus(count: int, seed: int = 0) -> list[dict]:
    out = []
    for k, sc in enumerate(star_scenarios(count, seed)):
        rep = verify_star(sc.group, sc.datums, sc.module, strict=sc.strict)
        out.append({"index": k, "scenario": sc.description, "all_exact": rep.all_exact, "h0_isomorphism": rep.h0_isomorphism, "h_ord": rep.h_ord})
    return out


def square_zero_rings(p: int = 3) -> list[FiniteLocalRing]:
    return [prime_field(p), dual_numbers(p)]

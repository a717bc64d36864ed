"""Deformation functors at finite level, by exhaustive search.

Lifts of a residual representation are enumerated generator by generator
over kernel cosets, with relations checked as soon as all their letters are
assigned.  Square-zero comparisons with group cohomology, obstruction
cocycles and quasi-homomorphisms live here too.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import FiniteLocalRing, RMatrix, check_budget, det_mod_p, dual_numbers, fp_structure, group_array, mat_inverse, matmul, prime_field
from .errors import BudgetExceeded, CentralizerViolation, KernelNotSquareZero, NotAHomomorphism, PresentationError
from .galois import FiniteGroup, GModule, Representation, adjoint_module, cochain_complex, cochain_differential, cocycle_space, group_cohomology
from .complexes import cohomology_basis
from .linalg import in_span_fp, kernel_generators_zpe, nullspace_fp, rank_fp, solve_fp


def batch_inverse(ring: FiniteLocalRing, mats: np.ndarray) -> np.ndarray:
    mats = np.asarray(mats)
    out = np.empty_like(mats)
    flat = mats.reshape((-1,) + mats.shape[-3:])
    res = out.reshape(flat.shape)
    for i, m in enumerate(flat):
        res[i] = mat_inverse(RMatrix(ring, m)).entries
    return out


def _keys(arr: np.ndarray) -> list[bytes]:
    flat = np.ascontiguousarray(arr.reshape(arr.shape[0], -1), dtype=np.int64)
    return [row.tobytes() for row in flat]


def _lex_order(arr: np.ndarray) -> np.ndarray:
    flat = arr.reshape(arr.shape[0], -1)
    if flat.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    return np.lexsort(flat.T[::-1])


# ---------------------------------------------------------------------------
# presentations


_PRESENTATION_OK: set = set()


def _gl2_f3_group() -> FiniteGroup:
    f3 = prime_field(3)
    mats = f3.residue(group_array("gln", f3, 2))
    keys = {m.tobytes(): i for i, m in enumerate(mats)}
    table = np.array([[keys[((a @ b) % 3).tobytes()] for b in mats] for a in mats], dtype=np.int64)
    return FiniteGroup(table, generators=list(range(len(mats))))


def _count_homs(group: FiniteGroup, target: FiniteGroup, budget: int | None = None) -> tuple[int, int]:
    """(#generator tuples satisfying the relations, #tuples extending to homomorphisms)."""
    k = len(group.generators)
    check_budget(target.order**k, budget, "presentation check")
    tuples = np.array(list(itertools.product(range(target.order), repeat=k)), dtype=np.int64).reshape(-1, k)
    ok = np.ones(len(tuples), dtype=bool)
    for word in group.relations:
        val = np.full(len(tuples), target.identity)
        for letter in word:
            img = tuples[:, abs(letter) - 1]
            if letter < 0:
                img = target.inverse[img]
            val = target.table[val, img]
        ok &= val == target.identity
    relation_count = int(ok.sum())
    # Cayley-table route: extend along words for the generators, then test multiplicativity
    words = _element_words(group)
    hom_count = 0
    for t in tuples:
        img = np.empty(group.order, dtype=np.int64)
        for x, w in words.items():
            v = target.identity
            for letter in w:
                v = target.table[v, t[letter]]
            img[x] = v
        if np.array_equal(target.table[img[:, None], img[None, :]], img[group.table]):
            hom_count += 1
    return relation_count, hom_count


def _element_words(group: FiniteGroup) -> dict[int, list[int]]:
    """Shortest positive word (0-based generator indices) for each element, BFS order."""
    words = {group.identity: []}
    frontier = [group.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for i, g in enumerate(group.generators):
                y = group.mul(x, g)
                if y not in words:
                    words[y] = words[x] + [i]
                    nxt.append(y)
        frontier = nxt
    return words


def check_presentation(group: FiniteGroup, target: FiniteGroup | None = None, budget: int | None = None) -> None:
    """Relations are sufficient iff homomorphism counts agree by both routes."""
    key = (group.table.tobytes(), tuple(map(tuple, group.relations)), tuple(group.generators))
    if target is None and key in _PRESENTATION_OK:
        return
    targets = [target] if target is not None else [group, _gl2_f3_group()]
    for t in targets:
        by_relations, by_table = _count_homs(group, t, budget)
        if by_relations != by_table:
            raise PresentationError(
                f"relations admit {by_relations} generator tuples but only {by_table} homomorphisms into a group of order {t.order}"
            )
    if target is None:
        _PRESENTATION_OK.add(key)


# ---------------------------------------------------------------------------
# residual representations and lifts


@dataclass
class ResidualRep:
    group: FiniteGroup
    field: FiniteLocalRing
    gens: np.ndarray  # (k, n, n) over F_p
    rep: Representation = field(init=False)
    centralizer_condition: bool = field(init=False)

    def __post_init__(self):
        if not self.field.is_field:
            raise ValueError("residual representation must be over a prime field")
        self.gens = np.asarray(self.gens, dtype=np.int64) % self.field.p
        if len(self.gens) != len(self.group.generators):
            raise ValueError("one matrix per generator required")
        self.rep = Representation.from_generators(self.group, self.field, [self.field.lift_residue_matrix(g) for g in self.gens])
        self.centralizer_condition = group_cohomology(self.group, self.adjoint, 0).dim == 1

    @property
    def n(self) -> int:
        return self.gens.shape[1]

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def adjoint(self) -> GModule:
        return adjoint_module(self.rep)


@dataclass
class Lift:
    ring: FiniteLocalRing
    gens: np.ndarray  # (k, n, n, d)

    def key(self) -> bytes:
        return np.ascontiguousarray(self.gens, dtype=np.int64).tobytes()

    def representation(self, group: FiniteGroup) -> Representation:
        return Representation.from_generators(group, self.ring, list(self.gens))

    def to_json(self) -> list:
        return self.gens.tolist()


def _relations_by_level(group: FiniteGroup) -> dict[int, list]:
    levels: dict[int, list] = {}
    for word in group.relations:
        top = max(abs(l) for l in word) - 1
        levels.setdefault(top, []).append(word)
    return levels


def _eval_words(ring: FiniteLocalRing, assigned: np.ndarray, inverses: np.ndarray, words) -> np.ndarray:
    """Mask of rows of ``assigned`` (M, k, n, n, d) satisfying every word."""
    m, n = assigned.shape[0], assigned.shape[2]
    ident = ring.scalar_matrix(n)
    ok = np.ones(m, dtype=bool)
    for word in words:
        val = np.broadcast_to(ident, (m,) + ident.shape).copy()
        for letter in word:
            src = assigned if letter > 0 else inverses
            val = matmul(ring, val, src[:, abs(letter) - 1])
        ok &= np.all(val == ident, axis=(1, 2, 3))
    return ok


def kernel_coset(ring: FiniteLocalRing, residue_matrix: np.ndarray, budget: int | None = None) -> np.ndarray:
    """All lifts of a residue matrix, lexicographically sorted."""
    n = residue_matrix.shape[0]
    ker = group_array("kernelgln", ring, n, budget)
    coset = matmul(ring, ring.lift_residue_matrix(residue_matrix)[None], ker)
    return coset[_lex_order(coset)]


def enumerate_lifts(r: ResidualRep, ring: FiniteLocalRing, budget: int | None = None, threads: int = 1) -> list[Lift]:
    """Every homomorphism G -> GL_n(A) reducing to r, in lexicographic order of generator images."""
    if ring.p != r.p:
        raise ValueError("residue characteristic mismatch")
    check_presentation(r.group, budget=budget)
    k, n = len(r.group.generators), r.n
    if ring.is_field:
        return [Lift(ring, ring.lift_residue_matrix(r.gens))]
    nk = len(ring.maximal_ideal) ** (n * n)
    check_budget(nk**k, budget, "lift enumeration")
    cands = [kernel_coset(ring, r.gens[i], budget) for i in range(k)]
    invs = [batch_inverse(ring, c) for c in cands]
    levels = _relations_by_level(r.group)

    def extend(start_rows: np.ndarray) -> np.ndarray:
        assigned = cands[0][start_rows][:, None]
        inv = invs[0][start_rows][:, None]
        ok = _eval_words(ring, assigned, inv, levels.get(0, []))
        assigned, inv = assigned[ok], inv[ok]
        for i in range(1, k):
            m, c = assigned.shape[0], cands[i].shape[0]
            a = np.concatenate([np.repeat(assigned, c, axis=0), np.tile(cands[i], (m, 1, 1, 1))[:, None]], axis=1)
            b = np.concatenate([np.repeat(inv, c, axis=0), np.tile(invs[i], (m, 1, 1, 1))[:, None]], axis=1)
            ok = _eval_words(ring, a, b, levels.get(i, []))
            assigned, inv = a[ok], b[ok]
        return assigned

    rows = np.arange(cands[0].shape[0])
    chunks = np.array_split(rows, max(1, threads)) if threads > 1 else [rows]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(extend, chunks))
    else:
        parts = [extend(c) for c in chunks]
    found = np.concatenate(parts, axis=0) if parts else np.zeros((0, k, n, n, ring.d), dtype=np.int64)
    lifts = []
    for gens in found:
        lift = Lift(ring, gens)
        try:
            lift.representation(r.group)
        except NotAHomomorphism as exc:
            raise PresentationError("relations hold but the generator images do not define a homomorphism") from exc
        lifts.append(lift)
    return lifts


@dataclass
class ClassReport:
    representatives: list[Lift]
    orbit_of: list[int]  # class index of every lift, in lift order
    conjugation_stable: bool


def deformation_classes(lifts: Sequence[Lift], ring: FiniteLocalRing, budget: int | None = None) -> ClassReport:
    """Orbits under conjugation by ker(GL_n(A) -> GL_n(k)); representative = lexicographic minimum."""
    if not lifts:
        return ClassReport([], [], True)
    n = lifts[0].gens.shape[1]
    ker = group_array("kernelgln", ring, n, budget)
    check_budget(len(ker) * len(lifts), budget, "conjugation orbits")
    kinv = batch_inverse(ring, ker)
    index = {l.key(): i for i, l in enumerate(lifts)}
    orbit = [-1] * len(lifts)
    reps: list[Lift] = []
    stable = True
    for i, lift in enumerate(lifts):
        if orbit[i] >= 0:
            continue
        conj = matmul(ring, matmul(ring, kinv[:, None], lift.gens[None]), ker[:, None])
        members = set()
        for key in _keys(conj):
            j = index.get(key)
            if j is None:
                stable = False
                continue
            members.add(j)
        cls = len(reps)
        for j in members:
            orbit[j] = cls
        reps.append(lifts[min(members)])  # lifts are sorted, so the smallest index is the lexicographic minimum
    return ClassReport(reps, orbit, stable)


def conjugate_lift(lift: Lift, g: np.ndarray) -> Lift:
    """g^{-1} rho g."""
    ring = lift.ring
    gi = mat_inverse(RMatrix(ring, g)).entries
    return Lift(ring, matmul(ring, matmul(ring, gi[None], lift.gens), g[None]))


# ---------------------------------------------------------------------------
# ordinary lifts


def _is_upper(mats: np.ndarray) -> np.ndarray:
    n = mats.shape[-3]
    low = np.tril_indices(n, -1)
    return ~np.any(mats[..., low[0], low[1], :], axis=(-1, -2))


_COSETS: dict = {}


def _coset_and_inverse(ring: FiniteLocalRing, gbar: np.ndarray, budget: int | None):
    key = (id(ring), np.ascontiguousarray(gbar, dtype=np.int64).tobytes())
    hit = _COSETS.get(key)
    if hit is None or hit[0] is not ring:
        coset = kernel_coset(ring, gbar, budget)
        hit = _COSETS[key] = (ring, coset, batch_inverse(ring, coset))
    else:
        check_budget(len(hit[1]), budget)
    return hit[1], hit[2]


def is_ordinary(lift: Lift, group: FiniteGroup, places: Sequence[tuple[Sequence[int], np.ndarray]], budget: int | None = None) -> bool:
    """Some lift g_v of gbar_v puts rho|G_v into B(A), at every place (g_v rho g_v^{-1} upper triangular)."""
    ring = lift.ring
    table = lift.representation(group).mats
    for elements, gbar in places:
        coset, cinv = _coset_and_inverse(ring, np.asarray(gbar) % ring.p, budget)
        local = table[list(elements)]
        conj = matmul(ring, matmul(ring, coset[:, None], local[None]), cinv[:, None])
        if not np.any(np.all(_is_upper(conj), axis=1)):
            return False
    return True


def ordinary_filter(classes: Sequence[Lift], group: FiniteGroup, places, budget: int | None = None) -> list[Lift]:
    return [c for c in classes if is_ordinary(c, group, places, budget)]


# ---------------------------------------------------------------------------
# square-zero comparison with cohomology


def coefficient_module(r: ResidualRep, ring: FiniteLocalRing, ideal: np.ndarray | None = None):
    """g_k (x) I for an ideal I killed by p and by m_A: (module, basis of I, coordinate lookup)."""
    ideal = ring.maximal_ideal if ideal is None else ideal
    basis, coords = fp_structure(ring, ideal)
    t = len(basis)
    ad = adjoint_module(r.rep)
    action = np.einsum("gij,ab->giajb", ad.action, np.eye(t, dtype=np.int64)).reshape(r.group.order, ad.rank * t, ad.rank * t)
    return GModule(r.group, r.p, 1, action % r.p), basis, coords


def _square_zero(ring: FiniteLocalRing, ideal: np.ndarray) -> bool:
    prods = ring.times(ideal[:, None, :], ideal[None, :, :])
    return not np.any(prods)


def cocycle_of(lift_table: np.ndarray, base_table: np.ndarray, base_inverse: np.ndarray, ring: FiniteLocalRing, coords) -> np.ndarray:
    """X(g) = rho(g) rho0(g)^{-1} - 1 in coordinates of g (x) I, all g."""
    n = lift_table.shape[1]
    x = (matmul(ring, lift_table, base_inverse) - ring.scalar_matrix(n)[None]) % ring.mod
    idx = ring.indices(x)
    return np.array([coords[int(i)] for i in idx.ravel()], dtype=np.int64).ravel()


@dataclass
class BijectionReport:
    lifts: int
    cocycles: int
    injective: bool
    all_cocycles: bool
    surjective: bool
    conjugation_is_coboundary: bool
    pairs_checked: int

    @property
    def ok(self) -> bool:
        return self.injective and self.all_cocycles and self.surjective and self.conjugation_is_coboundary and self.lifts == self.cocycles

    def to_json(self) -> dict:
        return {
            "lifts": self.lifts,
            "cocycles": self.cocycles,
            "injective": self.injective,
            "lands_in_Z1": self.all_cocycles,
            "surjective": self.surjective,
            "conjugation_is_coboundary": self.conjugation_is_coboundary,
            "pairs_checked": self.pairs_checked,
        }


def lift_cocycle_bijection(r: ResidualRep, ring: FiniteLocalRing, lifts: Sequence[Lift], budget: int | None = None, max_pairs: int = 20000) -> BijectionReport:
    """Match lifts with Z^1(G, g (x) m_A) explicitly, in both directions."""
    ideal = ring.maximal_ideal
    if not _square_zero(ring, ideal):
        raise KernelNotSquareZero("maximal ideal is not square-zero")
    module, basis, coords = coefficient_module(r, ring)
    group, n, p = r.group, r.n, r.p
    if not lifts:
        return BijectionReport(0, 0, True, True, False, True, 0)
    canonical = ring.lift_residue_matrix(r.gens)
    base = next((l for l in lifts if np.array_equal(l.gens, canonical)), lifts[0])
    base_table = base.representation(group).mats
    base_inv = base_table[group.inverse]
    tables = np.stack([l.representation(group).mats for l in lifts])
    vecs = np.stack([cocycle_of(t, base_table, base_inv, ring, coords) for t in tables])
    d1 = cochain_differential(group, module, 1)
    lands = not np.any((vecs @ d1.T) % p)
    injective = len(set(_keys(vecs))) == len(lifts)
    z1 = cocycle_space(group, module, 1)
    check_budget(p ** z1.shape[1], budget, "cocycle enumeration")
    # inverse direction: each cocycle gives (1 + X) rho0 on every element
    known = {l.key() for l in lifts}
    surjective = True
    basis_arr = np.stack(basis)
    for c in itertools.product(range(p), repeat=z1.shape[1]):
        z = (z1 @ np.array(c, dtype=np.int64)) % p if z1.shape[1] else np.zeros(z1.shape[0], dtype=np.int64)
        x = np.einsum("gijt,td->gijd", z.reshape(group.order, n, n, len(basis)), basis_arr) % ring.mod
        rho = matmul(ring, (x + ring.scalar_matrix(n)[None]) % ring.mod, base_table)
        gens = rho[list(group.generators)]
        if Lift(ring, gens).key() not in known:
            surjective = False
            break
    # kernel conjugation by 1 + Y shifts the cocycle by d^0(Y)
    ker = group_array("kernelgln", ring, n, budget)
    kinv = batch_inverse(ring, ker)
    d0 = cochain_differential(group, module, 0)
    y_vecs = np.stack([np.array([coords[int(i)] for i in ring.indices((k - ring.scalar_matrix(n)) % ring.mod).ravel()]).ravel() for k in ker])
    total = len(lifts) * len(ker)
    stride = max(1, total // max_pairs)
    conj_ok, checked = True, 0
    for flat in range(0, total, stride):
        li, ki = divmod(flat, len(ker))
        conj = matmul(ring, matmul(ring, kinv[ki][None], tables[li]), ker[ki][None])
        v = cocycle_of(conj, base_table, base_inv, ring, coords)
        if not np.array_equal((v - vecs[li]) % p, (d0 @ y_vecs[ki]) % p):
            conj_ok = False
            break
        checked += 1
    return BijectionReport(len(lifts), p ** z1.shape[1], injective, lands, surjective, conj_ok, checked)


@dataclass
class TangentReport:
    framed_lifts: int
    z1_size: int
    classes: int
    h1_size: int
    centralizer_condition: bool
    conjugation_stable: bool
    bijection: BijectionReport | None = None

    @property
    def framed_ok(self) -> bool:
        return self.framed_lifts == self.z1_size

    @property
    def classes_ok(self) -> bool | None:
        if not self.centralizer_condition:
            return None
        return self.classes == self.h1_size

    def to_json(self) -> dict:
        out = {
            "framed_lifts": self.framed_lifts,
            "Z1_size": self.z1_size,
            "classes": self.classes,
            "H1_size": self.h1_size,
            "centralizer_condition": self.centralizer_condition,
            "conjugation_stable": self.conjugation_stable,
            "framed_ok": self.framed_ok,
            "classes_ok": self.classes_ok,
        }
        if self.bijection is not None:
            out["bijection"] = self.bijection.to_json()
        return out


def tangent_check(r: ResidualRep, budget: int | None = None, threads: int = 1, ring: FiniteLocalRing | None = None) -> TangentReport:
    """|D^box(k[eps])| against |Z^1(G, g_k)| and |D(k[eps])| against p^{dim H^1}."""
    ring = ring or dual_numbers(r.p)
    lifts = enumerate_lifts(r, ring, budget, threads)
    classes = deformation_classes(lifts, ring, budget)
    module, _, _ = coefficient_module(r, ring)
    z1 = cocycle_space(r.group, module, 1).shape[1]
    h1 = group_cohomology(r.group, module, 1).dim
    bij = lift_cocycle_bijection(r, ring, lifts, budget)
    return TangentReport(len(lifts), r.p**z1, len(classes.representatives), r.p**h1, r.centralizer_condition, classes.conjugation_stable, bij)


# ---------------------------------------------------------------------------
# obstructions


@dataclass
class Surjection:
    """Ring surjection A1 -> A0 given on additive coordinates by an integer matrix."""

    source: FiniteLocalRing
    target: FiniteLocalRing
    matrix: np.ndarray  # (d0, d1)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=np.int64)
        s, t = self.source, self.target
        if self.matrix.shape != (t.d, s.d) or s.p != t.p:
            raise ValueError("surjection matrix has the wrong shape")
        img = self.apply(s.elements)
        if len(np.unique(t.indices(img))) != t.size:
            raise ValueError("map is not surjective")
        if not np.array_equal(self.apply(s.one), t.one % t.mod):
            raise ValueError("map does not preserve 1")
        e = s.elements
        lhs = self.apply(s.times(e[:, None], e[None, :]))
        rhs = t.times(img[:, None], img[None, :])
        if not np.array_equal(lhs, rhs):
            raise ValueError("map is not multiplicative")

    def apply(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("ij,...j->...i", self.matrix, np.asarray(x)) % self.target.mod

    @property
    def kernel(self) -> np.ndarray:
        img = self.apply(self.source.elements)
        return self.source.elements[~np.any(img, axis=1)]

    def section(self, which: str = "min") -> np.ndarray:
        """Set-theoretic section as a table target index -> source element (lexicographic min or max preimage)."""
        s, t = self.source, self.target
        img = t.indices(self.apply(s.elements))
        out = np.zeros((t.size, s.d), dtype=np.int64)
        order = range(s.size) if which == "min" else range(s.size - 1, -1, -1)
        seen = np.zeros(t.size, dtype=bool)
        for i in order:
            if not seen[img[i]]:
                seen[img[i]] = True
                out[img[i]] = s.elements[i]
        return out


@dataclass
class ObstructionReport:
    cocycle: np.ndarray
    class_coords: np.ndarray
    second_class_coords: np.ndarray
    is_cocycle: bool
    lift: np.ndarray | None  # full table over A1 when the class vanishes

    @property
    def is_zero(self) -> bool:
        return not np.any(self.class_coords)

    @property
    def section_independent(self) -> bool:
        return np.array_equal(self.class_coords, self.second_class_coords)

    def to_json(self) -> dict:
        return {
            "class": self.class_coords.tolist(),
            "class_second_section": self.second_class_coords.tolist(),
            "is_cocycle": self.is_cocycle,
            "zero": self.is_zero,
            "section_independent": self.section_independent,
            "lift_exhibited": self.lift is not None,
        }


def _obstruction_module(rho0: Representation, surj: Surjection):
    a1 = surj.source
    ideal = surj.kernel
    if not _square_zero(a1, ideal):
        raise KernelNotSquareZero("kernel of the surjection is not square-zero")
    basis, coords = fp_structure(a1, ideal)
    n, t = rho0.n, len(basis)
    sec = surj.section("min")
    tilde = sec[rho0.ring.indices(rho0.mats)]
    tinv = batch_inverse(a1, tilde)
    # g (x) I with G acting by conjugation through any lift
    units = np.zeros((n * n * t, n, n, a1.d), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            for s in range(t):
                units[(i * n + j) * t + s, i, j] = basis[s]
    act = matmul(a1, matmul(a1, tilde[:, None], units[None]), tinv[:, None])  # (|G|, r, n, n, d)
    r = n * n * t
    action = np.zeros((rho0.group.order, r, r), dtype=np.int64)
    for g in range(rho0.group.order):
        action[g] = np.array([[coords[int(x)] for x in row] for row in a1.indices(act[g]).reshape(r, n * n)]).reshape(r, r).T
    return GModule(rho0.group, a1.p, 1, action % a1.p), basis, coords


def _obstruction_cocycle(rho0: Representation, surj: Surjection, which: str, coords) -> np.ndarray:
    a1, group = surj.source, rho0.group
    n = rho0.n
    sec = surj.section(which)
    tilde = sec[rho0.ring.indices(rho0.mats)]
    tinv = batch_inverse(a1, tilde)
    ab = matmul(a1, tilde[:, None], tilde[None, :])  # rho~(a) rho~(b)
    c = (matmul(a1, ab, tinv[group.table]) - a1.scalar_matrix(n)) % a1.mod
    idx = a1.indices(c)
    return np.array([coords[int(i)] for i in idx.ravel()], dtype=np.int64).ravel()


def obstruction_class(rho0: Representation, surj: Surjection) -> ObstructionReport:
    """Class of c(a, b) = rho~(a) rho~(b) rho~(ab)^{-1} - 1 in H^2(G, g (x) I)."""
    if rho0.ring != surj.target:
        raise ValueError("representation is not over the target of the surjection")
    module, basis, coords = _obstruction_module(rho0, surj)
    group, p = rho0.group, module.p
    cc = cochain_complex(group, module, 3)
    h2 = cohomology_basis(cc, 2)
    c1 = _obstruction_cocycle(rho0, surj, "min", coords)
    c2 = _obstruction_cocycle(rho0, surj, "max", coords)
    is_cocycle = not np.any((cc.d(2) @ c1) % p) and not np.any((cc.d(2) @ c2) % p)
    k1 = h2.coords(c1) if is_cocycle else np.zeros(h2.dim, dtype=np.int64)
    k2 = h2.coords(c2) if is_cocycle else np.zeros(h2.dim, dtype=np.int64)
    lift = None
    if is_cocycle and not np.any(k1):
        # c = -dX; then (1 + X) rho~ is multiplicative
        x = solve_fp(cc.d(1), (-c1) % p, p)
        a1, n = surj.source, rho0.n
        sec = surj.section("min")
        tilde = sec[rho0.ring.indices(rho0.mats)]
        xm = np.einsum("gijt,td->gijd", x.reshape(group.order, n, n, len(basis)), np.stack(basis)) % a1.mod
        lift = matmul(a1, (xm + a1.scalar_matrix(n)[None]) % a1.mod, tilde)
        prods = matmul(a1, lift[:, None], lift[None, :])
        if not np.array_equal(prods, lift[group.table]):
            raise AssertionError("corrected lift is not multiplicative")
    return ObstructionReport(c1, k1, k2, is_cocycle, lift)


def exhaustive_lift_search(rho0: Representation, surj: Surjection, budget: int | None = None) -> np.ndarray | None:
    """Search generator images over A1 for a homomorphism reducing to rho0; first hit or None."""
    a1, group, n = surj.source, rho0.group, rho0.n
    check_presentation(group, budget=budget)
    ideal = surj.kernel
    check_budget(len(ideal) ** (n * n * len(group.generators)), budget, "lift search")
    sec = surj.section("min")
    idx = np.array(list(itertools.product(range(len(ideal)), repeat=n * n)), dtype=np.int64).reshape(-1, n * n)
    pert = ideal[idx].reshape(-1, n, n, a1.d)
    cands = []
    for g in group.generators:
        base = sec[rho0.ring.indices(rho0.mats[g])]
        c = (base[None] + pert) % a1.mod
        cands.append(c[_lex_order(c)])
    invs = [batch_inverse(a1, c) for c in cands]
    combos = itertools.product(*[range(len(c)) for c in cands])
    words = list(group.relations)
    for combo in combos:
        gens = np.stack([cands[i][j] for i, j in enumerate(combo)])[None]
        ginv = np.stack([invs[i][j] for i, j in enumerate(combo)])[None]
        if _eval_words(a1, gens, ginv, words)[0]:
            try:
                return Representation.from_generators(group, a1, list(gens[0])).mats
            except NotAHomomorphism:
                continue
    return None


# ---------------------------------------------------------------------------
# quasi-homomorphisms


@dataclass
class QuasiHom:
    group: FiniteGroup
    ring: FiniteLocalRing
    rho: np.ndarray  # (|G|, n, n, d)
    phi: np.ndarray

    def defect(self) -> tuple[int, int] | None:
        """First (x, y) violating rho(x)^{-1} rho(xy) = phi(x) rho(y) phi(x)^{-1}."""
        ring, g = self.ring, self.group
        rinv = batch_inverse(ring, self.rho)
        pinv = batch_inverse(ring, self.phi)
        lhs = matmul(ring, rinv[:, None], self.rho[g.table])
        rhs = matmul(ring, matmul(ring, self.phi[:, None], self.rho[None, :]), pinv[:, None])
        bad = np.argwhere(np.any(lhs != rhs, axis=(2, 3, 4)))
        return None if len(bad) == 0 else (int(bad[0][0]), int(bad[0][1]))

    def is_homomorphism(self) -> bool:
        prods = matmul(self.ring, self.rho[:, None], self.rho[None, :])
        return bool(np.array_equal(prods, self.rho[self.group.table]))


@dataclass
class QuasiHomReport:
    is_quasi: bool
    is_homomorphism: bool
    witness: np.ndarray | None
    counterexample: tuple[int, int] | None
    induced_hom_ok: bool | None

    def to_json(self) -> dict:
        return {
            "is_quasi": self.is_quasi,
            "is_homomorphism": self.is_homomorphism,
            "witness": None if self.witness is None else self.witness.tolist(),
            "counterexample": None if self.counterexample is None else list(self.counterexample),
            "induced_hom_ok": self.induced_hom_ok,
        }


def _linear_constraints(ring: FiniteLocalRing, lefts: np.ndarray, rights: np.ndarray) -> np.ndarray:
    """Matrix (over Z/p^e) of Phi -> (L_y Phi - Phi R_y)_y on additive coordinates of M_n(A)."""
    n, d = lefts.shape[1], ring.d
    basis = np.eye(n * n * d, dtype=np.int64).reshape(n * n * d, n, n, d)
    out = matmul(ring, lefts[:, None], basis[None]) - matmul(ring, basis[None], rights[:, None])
    # (y, basis, n, n, d) -> rows (y, n, n, d), columns basis
    return np.moveaxis(out % ring.mod, 1, -1).reshape(-1, n * n * d)


def _first_invertible_solution(ring: FiniteLocalRing, system: np.ndarray, n: int, budget: int | None) -> np.ndarray | None:
    ident = ring.scalar_matrix(n)
    if not np.any((system @ ident.ravel()) % ring.mod):
        return ident
    gens, orders = kernel_generators_zpe(system, ring.p, ring.e)
    if gens.shape[1] == 0:
        return None
    sizes = [ring.p**a for a in orders]
    check_budget(int(np.prod(sizes, dtype=object)), budget, "quasi-homomorphism witness search")
    for coeffs in itertools.product(*[range(s) for s in sizes]):
        v = (gens @ np.array(coeffs, dtype=np.int64)) % ring.mod
        m = v.reshape(n, n, ring.d)
        if det_mod_p(ring.residue(m), ring.p) != 0:
            return m
    return None


def quasi_hom_check(group: FiniteGroup, ring: FiniteLocalRing, table: np.ndarray, budget: int | None = None) -> QuasiHomReport:
    """Search, for each x, an invertible phi(x) with rho(x)^{-1} rho(xy) = phi(x) rho(y) phi(x)^{-1}.

    The condition is linear in phi(x), so the full solution module is
    enumerated and its first invertible element (in coefficient order) taken.
    """
    table = np.asarray(table, dtype=np.int64) % ring.mod
    n = table.shape[1]
    if not np.array_equal(table[group.identity], ring.scalar_matrix(n)):
        raise ValueError("rho(e) must be the identity")
    inv = batch_inverse(ring, table)
    prods = matmul(ring, table[:, None], table[None, :])
    is_hom = bool(np.array_equal(prods, table[group.table]))
    if is_hom:
        phi = np.broadcast_to(ring.scalar_matrix(n), table.shape).copy()
        return QuasiHomReport(True, True, phi, None, True)
    witness = np.zeros_like(table)
    for x in range(group.order):
        lefts = matmul(ring, inv[x][None], table[group.table[x]])
        sol = _first_invertible_solution(ring, _linear_constraints(ring, lefts, table), n, budget)
        if sol is None:
            # smallest prefix of y's that already rules out every invertible phi(x)
            for y in range(group.order):
                sub = _linear_constraints(ring, lefts[: y + 1], table[: y + 1])
                if _first_invertible_solution(ring, sub, n, budget) is None:
                    return QuasiHomReport(False, False, None, (x, y), None)
            return QuasiHomReport(False, False, None, (x, group.order - 1), None)
        witness[x] = sol
    q = QuasiHom(group, ring, table, witness)
    if q.defect() is not None:
        raise AssertionError("witness search returned an invalid witness")
    return QuasiHomReport(True, False, witness, None, induced_hom_ok(q))


def induced_hom_ok(q: QuasiHom) -> bool:
    """phi(xy)^{-1} phi(x) phi(y) centralizes rho(G) for all x, y."""
    ring, g = q.ring, q.group
    pinv = batch_inverse(ring, q.phi)
    defect = matmul(ring, pinv[g.table], matmul(ring, q.phi[:, None], q.phi[None, :]))  # (x, y)
    flat = defect.reshape((-1,) + defect.shape[2:])
    left = matmul(ring, flat[:, None], q.rho[None])
    right = matmul(ring, q.rho[None], flat[:, None])
    return bool(np.array_equal(left, right))


def build_quasi_hom(sigma: Representation, phi: Representation, g: np.ndarray) -> tuple[QuasiHom, bool]:
    """rho(x) = g^{-1} sigma(x) phi(x) g phi(x)^{-1}; returns (QuasiHom, is_homomorphism)."""
    ring, group = sigma.ring, sigma.group
    if phi.ring != ring or phi.group is not group and not np.array_equal(phi.group.table, group.table):
        raise ValueError("sigma and phi must share group and ring")
    commute_l = matmul(ring, phi.mats[:, None], sigma.mats[None])
    commute_r = matmul(ring, sigma.mats[None], phi.mats[:, None])
    if not np.array_equal(commute_l, commute_r):
        raise CentralizerViolation("phi does not land in the centralizer of sigma(G)")
    g = np.asarray(g, dtype=np.int64) % ring.mod
    gi = mat_inverse(RMatrix(ring, g)).entries
    pinv = batch_inverse(ring, phi.mats)
    rho = matmul(ring, matmul(ring, matmul(ring, matmul(ring, gi[None], sigma.mats), phi.mats), g[None]), pinv)
    q = QuasiHom(group, ring, rho, phi.mats.copy())
    if q.defect() is not None:
        raise AssertionError("constructed table fails the quasi-homomorphism identity")
    return q, q.is_homomorphism()


def block_sum(ring: FiniteLocalRing, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Block-diagonal embedding of (..., n, n, d) and (..., m, m, d)."""
    a, b = np.asarray(a), np.asarray(b)
    n, m = a.shape[-3], b.shape[-3]
    shape = np.broadcast_shapes(a.shape[:-3], b.shape[:-3])
    out = np.zeros(shape + (n + m, n + m, ring.d), dtype=np.int64)
    out[..., :n, :n, :] = a
    out[..., n:, n:, :] = b
    return out

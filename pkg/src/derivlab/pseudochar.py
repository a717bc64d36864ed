"""GL_n pseudo-characters as tables of traces of words.

A table stores, for every tuple size m <= M, every word w over the letters
1..m of length <= L (shortlex order) and every tuple (g_1..g_m) in G^m, the
trace of w evaluated on matrices attached to the tuple.  Tuples are indexed
in mixed radix with g_1 most significant.  For a table coming from a map
rho: G -> GL_n(A) the matrices are the incremental quotients
rho(g_1...g_{i-1})^{-1} rho(g_1...g_i), which are rho(g_i) when rho is a
homomorphism.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .algebra import FiniteLocalRing, check_budget, group_array, matmul, prime_field
from .deformation import Lift, QuasiHom, ResidualRep, batch_inverse, kernel_coset, quasi_hom_check
from .errors import Ambiguous, NoMatch
from .galois import FiniteGroup, Representation

DEFAULT_M = 3
DEFAULT_L = 6


def words(m: int, length: int) -> list[tuple[int, ...]]:
    """Words over letters 1..m of length <= ``length`` in shortlex order."""
    out: list[tuple[int, ...]] = [()]
    level: list[tuple[int, ...]] = [()]
    for _ in range(length):
        level = [w + (a,) for w in level for a in range(1, m + 1)]
        out.extend(level)
    return out


def _word_index(m: int, length: int) -> dict[tuple[int, ...], int]:
    return {w: i for i, w in enumerate(words(m, length))}


def _trace(ring: FiniteLocalRing, mats: np.ndarray) -> np.ndarray:
    return np.einsum("...iid->...d", mats) % ring.mod


def word_traces(ring: FiniteLocalRing, tuples: np.ndarray, length: int) -> np.ndarray:
    """Traces of all words (shortlex, letters 1..m) on a batch of tuples.

    ``tuples`` has shape (B, m, n, n, d); the result has shape (W, B, d).
    """
    b, m, n = tuples.shape[0], tuples.shape[1], tuples.shape[2]
    ident = ring.scalar_matrix(n)
    level = np.broadcast_to(ident, (1, b) + ident.shape)
    traces = [_trace(ring, level)]
    letters = np.moveaxis(tuples, 1, 0)  # (m, B, n, n, d)
    for _ in range(length):
        level = matmul(ring, level[:, None], letters[None]).reshape((-1, b) + ident.shape)
        traces.append(_trace(ring, level))
    return np.concatenate(traces, axis=0)


def _tuple_digits(order: int, m: int) -> np.ndarray:
    """(order^m, m) array of group elements, g_1 most significant."""
    if m == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(range(order), repeat=m)), dtype=np.int64)


def _tuple_index(order: int, digits: np.ndarray) -> np.ndarray:
    idx = np.zeros(digits.shape[0], dtype=np.int64)
    for j in range(digits.shape[1]):
        idx = idx * order + digits[:, j]
    return idx


@dataclass
class PseudoCharacterTable:
    group: FiniteGroup
    ring: FiniteLocalRing
    n: int
    M: int
    L: int
    values: dict[int, np.ndarray]  # m -> (num_words, |G|^m, d)
    from_homomorphism: bool | None = None

    def words(self, m: int) -> list[tuple[int, ...]]:
        return words(m, self.L)

    def value(self, word: Sequence[int], elements: Sequence[int]) -> np.ndarray:
        m = len(elements)
        w = _word_index(m, self.L)[tuple(word)]
        t = int(_tuple_index(self.group.order, np.array([elements], dtype=np.int64))[0])
        return self.values[m][w, t]

    def reduce(self) -> "PseudoCharacterTable":
        """Reduction modulo the maximal ideal, as a table over F_p."""
        f = prime_field(self.ring.p)
        vals = {m: self.ring.residue(v)[..., None] % f.p for m, v in self.values.items()}
        return PseudoCharacterTable(self.group, f, self.n, self.M, self.L, vals, self.from_homomorphism)

    def same_values(self, other: "PseudoCharacterTable") -> bool:
        if (self.M, self.L, self.n) != (other.M, other.L, other.n) or self.ring != other.ring:
            return False
        return all(np.array_equal(self.values[m], other.values[m]) for m in self.values)

    def iter_entries(self) -> Iterator[dict]:
        """Entries keyed by (m, word, tuple), in storage order."""
        order = self.group.order
        for m in range(1, self.M + 1):
            digits = _tuple_digits(order, m)
            for wi, w in enumerate(self.words(m)):
                for ti in range(digits.shape[0]):
                    yield {"m": m, "word": list(w), "tuple": digits[ti].tolist(), "value": self.values[m][wi, ti].tolist()}

    def stream_json(self, fh) -> None:
        """One JSON object per line, header first."""
        header = {"ring": self.ring.to_spec(), "n": self.n, "M": self.M, "L": self.L, "group_order": self.group.order}
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for entry in self.iter_entries():
            fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def to_json(self) -> dict:
        return {
            "ring": self.ring.to_spec(),
            "n": self.n,
            "M": self.M,
            "L": self.L,
            "group_order": self.group.order,
            "values": {str(m): v.tolist() for m, v in self.values.items()},
        }


def table_size(group: FiniteGroup, M: int, L: int) -> int:
    return sum(len(words(m, L)) * group.order**m for m in range(1, M + 1))


def _source_table(source, group: FiniteGroup | None):
    if isinstance(source, QuasiHom):
        return source.group, source.ring, source.rho
    if isinstance(source, Representation):
        return source.group, source.ring, source.mats
    if isinstance(source, Lift):
        if group is None:
            raise ValueError("a Lift needs its group")
        rep = source.representation(group)
        return group, rep.ring, rep.mats
    raise TypeError(f"cannot build a table from {type(source).__name__}")


def incremental_tuples(ring: FiniteLocalRing, group: FiniteGroup, rho: np.ndarray, m: int) -> np.ndarray:
    """(|G|^m, m, n, n, d): rho(g_1..g_{i-1})^{-1} rho(g_1..g_i) for every tuple."""
    digits = _tuple_digits(group.order, m)
    inv = batch_inverse(ring, rho)
    out = np.empty((digits.shape[0], m) + rho.shape[1:], dtype=np.int64)
    prefix = np.full(digits.shape[0], group.identity, dtype=np.int64)
    for i in range(m):
        nxt = group.table[prefix, digits[:, i]]
        out[:, i] = matmul(ring, inv[prefix], rho[nxt])
        prefix = nxt
    return out


def from_quasi_lift(source, M: int = DEFAULT_M, L: int = DEFAULT_L, group: FiniteGroup | None = None, budget: int | None = None) -> PseudoCharacterTable:
    """Trace-of-word table of a quasi-lift, representation or lift."""
    group, ring, rho = _source_table(source, group)
    rho = np.asarray(rho, dtype=np.int64) % ring.mod
    check_budget(table_size(group, M, L), budget, "pseudo-character table")
    values = {m: word_traces(ring, incremental_tuples(ring, group, rho, m), L) for m in range(1, M + 1)}
    prods = matmul(ring, rho[:, None], rho[None, :])
    is_hom = bool(np.array_equal(prods, rho[group.table]))
    return PseudoCharacterTable(group, ring, rho.shape[1], M, L, values, is_hom)


# ---------------------------------------------------------------------------
# axioms


@dataclass
class AxiomReport:
    relabel_checks: int = 0
    product_checks: int = 0
    identity_ok: bool = True
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.identity_ok and not self.violations

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "identity_ok": self.identity_ok,
            "relabel_checks": self.relabel_checks,
            "product_checks": self.product_checks,
            "violations": self.violations,
        }


def _first_bad(lhs: np.ndarray, rhs: np.ndarray):
    bad = np.argwhere(np.any(lhs != rhs, axis=-1))
    return None if len(bad) == 0 else (int(bad[0][0]), int(bad[0][1]))


def verify_axioms(t: PseudoCharacterTable, max_violations: int = 10) -> AxiomReport:
    """Exhaustive relabeling and product-substitution checks within (M, L).

    Relabeling: theta_m(zeta(w); g) = theta_n(w; g o zeta) for every
    zeta: {1..n} -> {1..m}.  Product: substituting letter n of w by the
    pair (n, n+1) evaluates like merging g_n g_{n+1} into one entry.
    """
    rep = AxiomReport()
    order, ring = t.group.order, t.ring
    empty = ring.scalar(t.n)
    for m in range(1, t.M + 1):
        if not np.all(t.values[m][0] == empty):
            rep.identity_ok = False
    index = {m: _word_index(m, t.L) for m in range(1, t.M + 1)}
    digits = {m: _tuple_digits(order, m) for m in range(1, t.M + 1)}

    def note(kind, word, tup, extra):
        if len(rep.violations) < max_violations:
            rep.violations.append({"axiom": kind, "word": list(word), "tuple": [int(x) for x in tup], **extra})

    for n in range(1, t.M + 1):
        src_words = t.words(n)
        for m in range(1, t.M + 1):
            for zeta in itertools.product(range(m), repeat=n):
                w_img = np.array([index[m][tuple(zeta[a - 1] + 1 for a in w)] for w in src_words])
                tmap = _tuple_index(order, digits[m][:, list(zeta)])
                lhs = t.values[m][w_img]
                rhs = t.values[n][:, tmap]
                rep.relabel_checks += lhs.shape[0] * lhs.shape[1]
                bad = _first_bad(lhs, rhs)
                if bad is not None:
                    note("relabel", src_words[bad[0]], digits[m][bad[1]], {"zeta": [z + 1 for z in zeta]})
    for n in range(1, t.M):
        src, tgt = [], []
        for i, w in enumerate(t.words(n)):
            hat = tuple(x for a in w for x in ((n, n + 1) if a == n else (a,)))
            if len(hat) <= t.L:
                src.append(i)
                tgt.append(index[n + 1][hat])
        d = digits[n + 1]
        merged = np.concatenate([d[:, : n - 1], t.group.table[d[:, n - 1], d[:, n]][:, None]], axis=1)
        tmap = _tuple_index(order, merged)
        lhs = t.values[n + 1][tgt]
        rhs = t.values[n][src][:, tmap]
        rep.product_checks += lhs.shape[0] * lhs.shape[1]
        bad = _first_bad(lhs, rhs)
        if bad is not None:
            note("product", t.words(n)[src[bad[0]]], d[bad[1]], {"n": n})
    return rep


@dataclass
class ReflectionReport:
    equivariant: bool
    verdict: str  # Pass | Fail | Inconclusive
    witness: dict | None
    checks: int
    L: int

    def to_json(self) -> dict:
        return {"equivariant": self.equivariant, "verdict": self.verdict, "witness": self.witness, "checks": self.checks, "L": self.L}


def reflection_check(t: PseudoCharacterTable) -> ReflectionReport:
    """theta(w; g_1..g_m) = theta(w with i -> m+1-i; g_m..g_1) on every stored entry.

    No violation proves nothing beyond (M, L): the verdict is Pass only for
    tables known to come from a homomorphism, Inconclusive otherwise.
    """
    order = t.group.order
    checks = 0
    for m in range(1, t.M + 1):
        index = _word_index(m, t.L)
        ws = t.words(m)
        w_img = np.array([index[tuple(m + 1 - a for a in w)] for w in ws])
        d = _tuple_digits(order, m)
        tmap = _tuple_index(order, d[:, ::-1])
        lhs = t.values[m]
        rhs = t.values[m][w_img][:, tmap]
        checks += lhs.shape[0] * lhs.shape[1]
        bad = _first_bad(lhs, rhs)
        if bad is not None:
            witness = {"m": m, "word": list(ws[bad[0]]), "tuple": d[bad[1]].tolist()}
            return ReflectionReport(False, "Fail", witness, checks, t.L)
    verdict = "Pass" if t.from_homomorphism else "Inconclusive"
    return ReflectionReport(True, verdict, None, checks, t.L)


# ---------------------------------------------------------------------------
# conjugacy of tuples


@dataclass
class TupleClassWitness:
    tuple: np.ndarray  # (k, n, n, d)
    target: np.ndarray
    conjugator: np.ndarray | None  # u with u t1 u^{-1} = t2, u in the residual kernel
    searched: int

    @property
    def equivalent(self) -> bool:
        return self.conjugator is not None

    def to_json(self) -> dict:
        return {"equivalent": self.equivalent, "conjugator": None if self.conjugator is None else self.conjugator.tolist(), "searched": self.searched}


def conj_equivalent(t1: np.ndarray, t2: np.ndarray, ring: FiniteLocalRing, budget: int | None = None) -> TupleClassWitness:
    """Exhaustive search of ker(GL_n(A) -> GL_n(k)) for u with u t1 u^{-1} = t2."""
    t1 = np.asarray(t1, dtype=np.int64) % ring.mod
    t2 = np.asarray(t2, dtype=np.int64) % ring.mod
    if t1.shape != t2.shape:
        raise ValueError("tuples of different shapes")
    if not np.array_equal(ring.residue(t1), ring.residue(t2)):
        return TupleClassWitness(t1, t2, None, 0)
    ker = group_array("kernelgln", ring, t1.shape[1], budget)
    ok = np.ones(len(ker), dtype=bool)
    for a, b in zip(t1, t2):
        ok &= np.all(matmul(ring, ker, a[None]) == matmul(ring, b[None], ker), axis=(1, 2, 3))
    hits = np.flatnonzero(ok)
    return TupleClassWitness(t1, t2, ker[hits[0]].copy() if len(hits) else None, len(ker))


# ---------------------------------------------------------------------------
# reconstruction


@dataclass
class Reconstruction:
    table: np.ndarray  # (|G|, n, n, d)
    generator_tuple: np.ndarray  # chosen lifts h_i of the generator images
    quasi_ok: bool
    table_matches: bool

    def to_json(self) -> dict:
        return {"table": self.table.tolist(), "generator_tuple": self.generator_tuple.tolist(), "quasi_ok": self.quasi_ok, "table_matches": self.table_matches}


def _scalar_commutant(r: ResidualRep) -> bool:
    return r.centralizer_condition


def _choose_generator_tuple(t: PseudoCharacterTable, r: ResidualRep, budget: int | None) -> np.ndarray:
    """First (lexicographic, generator by generator) lift tuple matching the table."""
    ring, group = t.ring, t.group
    s = len(group.generators)
    base = _tuple_index(group.order, np.array([group.generators], dtype=np.int64))[0]
    target = t.values[s][:, base]  # (W_s, d)
    index_s = _word_index(s, t.L)
    cosets = [kernel_coset(ring, r.gens[i], budget) for i in range(s)]

    def matching(prefix: list[np.ndarray], i: int) -> np.ndarray:
        cands = cosets[i]
        fixed = np.broadcast_to(np.stack(prefix), (len(cands), i) + cands.shape[1:]) if prefix else np.zeros((len(cands), 0) + cands.shape[1:], dtype=np.int64)
        tuples = np.concatenate([fixed, cands[:, None]], axis=1)
        tr = word_traces(ring, tuples, t.L)  # words over i+1 letters
        rows = np.array([index_s[w] for w in words(i + 1, t.L)])
        return np.flatnonzero(np.all(tr == target[rows][:, None], axis=(0, 2)))

    def search(prefix: list[np.ndarray]) -> list[np.ndarray] | None:
        i = len(prefix)
        if i == s:
            return prefix
        for c in matching(prefix, i):
            found = search(prefix + [cosets[i][c]])
            if found is not None:
                return found
        return None

    found = search([])
    if found is None:
        raise NoMatch("no lift of the generator images matches the table")
    return np.stack(found) if found else np.zeros((0, r.n, r.n, ring.d), dtype=np.int64)


def reconstruct(t: PseudoCharacterTable, r: ResidualRep, budget: int | None = None) -> Reconstruction:
    """Build rho: G -> GL_n(A) from a table, element by element.

    The generators g_1..g_s get a matching lift tuple h; each other element
    gets the unique lift g of its residual image whose word traces with
    (h, g) agree with the stored values at (g_1..g_s, element).
    """
    ring, group = t.ring, t.group
    if not _scalar_commutant(r):
        raise ValueError("residual representation must have scalar commutant")
    s = len(group.generators)
    n = r.n
    if s + 1 > t.M:
        raise ValueError(f"table needs tuple size {s + 1}, has {t.M}")
    table = np.empty((group.order, n, n, ring.d), dtype=np.int64)
    ident = ring.scalar_matrix(n)
    table[group.identity] = ident
    if group.order > 1:
        h = _choose_generator_tuple(t, r, budget)
    else:
        h = np.broadcast_to(ident, (s,) + ident.shape).copy()
    index = _word_index(s + 1, t.L)
    rows = np.array([index[w] for w in words(s + 1, t.L)])
    digits = np.array([list(group.generators) + [x] for x in range(group.order)], dtype=np.int64)
    cols = _tuple_index(group.order, digits)
    residual = r.rep.mats[..., 0]
    for x in range(group.order):
        if x == group.identity:
            continue
        cands = kernel_coset(ring, residual[x], budget)
        tuples = np.concatenate([np.broadcast_to(h, (len(cands),) + h.shape), cands[:, None]], axis=1)
        tr = word_traces(ring, tuples, t.L)
        target = t.values[s + 1][rows][:, cols[x]]
        hits = np.flatnonzero(np.all(tr == target[:, None], axis=(0, 2)))
        if len(hits) == 0:
            raise NoMatch(f"no lift of rho-bar({x}) matches the table")
        if len(hits) > 1:
            raise Ambiguous(f"{len(hits)} lifts of rho-bar({x}) match the table at L={t.L}")
        table[x] = cands[hits[0]]
    quasi_ok = quasi_hom_check(group, ring, table, budget).is_quasi
    again = from_quasi_lift(QuasiHom(group, ring, table, table), t.M, t.L, budget=budget)
    return Reconstruction(table, h, quasi_ok, again.same_values(t))

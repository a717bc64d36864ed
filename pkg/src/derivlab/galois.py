"""Finite groups, modules with a group action, and inhomogeneous group cochains.

Cochain convention: C^n = Maps(G^n, M), basis index ``tuple_index * rank + a``
with tuples ordered lexicographically (first entry most significant), and

    (d phi)(g0..gn) = g0.phi(g1..gn) + sum_{i=1..n} (-1)^i phi(.., g_{i-1} g_i, ..)
                      + (-1)^{n+1} phi(g0..g_{n-1}).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import FiniteLocalRing, check_budget, matmul
from .complexes import ChainMap, CochainComplex, HomologyBasis, cohomology, cohomology_basis, induced_map
from .errors import GroupError, NotAHomomorphism, NotASubgroup, NotBorelValued, PairingNotEquivariant
from .linalg import inverse_zpe


Word = Sequence[int]  # signed, 1-based generator indices


class FiniteGroup:
    """A finite group given by its Cayley table ``table[a, b] = a*b``."""

    def __init__(self, table, generators: Sequence[int] | None = None, relations: Sequence[Word] = (), labels=None, name: str | None = None):
        t = np.asarray(table, dtype=np.int64)
        n = t.shape[0]
        if t.shape != (n, n) or n == 0:
            raise GroupError("Cayley table must be square and nonempty")
        rng = np.arange(n)
        if not all(np.array_equal(np.sort(row), rng) for row in t) or not all(np.array_equal(np.sort(col), rng) for col in t.T):
            raise GroupError("Cayley table is not a Latin square")
        ids = [e for e in range(n) if np.array_equal(t[e], rng)]
        if not ids or not np.array_equal(t[:, ids[0]], rng):
            raise GroupError("no identity element")
        self.table = t
        self.table.setflags(write=False)
        self.identity = ids[0]
        # (ab)c == a(bc) for all triples
        lhs = t[t[:, :, None], rng[None, None, :]]
        rhs = t[rng[:, None, None], t[None, :, :]]
        if not np.array_equal(lhs, rhs):
            a, b, c = np.argwhere(lhs != rhs)[0]
            raise GroupError(f"Cayley table is not associative at ({a},{b},{c})")
        self.inverse = np.argmax(t == self.identity, axis=1)
        self.order = n
        self.generators = list(range(n)) if generators is None else [int(g) for g in generators]
        self.relations = [list(map(int, w)) for w in relations]
        self.labels = list(labels) if labels is not None else [str(i) for i in range(n)]
        self.name = name
        if len(self.closure(self.generators)) != n:
            raise GroupError("generators do not generate the group")
        for w in self.relations:
            if self.eval_word(w) != self.identity:
                raise GroupError(f"relation {w} does not hold")

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name or 'order ' + str(self.order)})"

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def eval_word(self, word: Word, gens: Sequence[int] | None = None) -> int:
        gens = self.generators if gens is None else gens
        x = self.identity
        for s in word:
            if s == 0 or abs(s) > len(gens):
                raise GroupError(f"bad letter {s} in word")
            g = gens[abs(s) - 1]
            x = self.mul(x, g if s > 0 else int(self.inverse[g]))
        return x

    def closure(self, elements: Sequence[int]) -> list[int]:
        """Subgroup generated by ``elements`` (sorted indices)."""
        seen = {self.identity}
        queue = deque([self.identity])
        gens = list(elements)
        while queue:
            x = queue.popleft()
            for g in gens:
                y = self.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return sorted(seen)

    def is_subgroup(self, elements: Sequence[int]) -> bool:
        s = sorted(set(int(x) for x in elements))
        if self.identity not in s:
            return False
        sub = self.table[np.ix_(s, s)]
        return bool(np.isin(sub, s).all())

    def subgroup(self, elements: Sequence[int], generators: Sequence[int] | None = None) -> tuple["FiniteGroup", np.ndarray]:
        """Subgroup as its own FiniteGroup plus the embedding (sorted indices)."""
        s = sorted(set(int(x) for x in elements))
        if not self.is_subgroup(s):
            raise NotASubgroup(f"{s} is not closed under multiplication")
        pos = {g: i for i, g in enumerate(s)}
        table = np.vectorize(pos.__getitem__)(self.table[np.ix_(s, s)]) if len(s) > 1 else np.zeros((1, 1), dtype=np.int64)
        gens = [pos[g] for g in generators] if generators is not None else None
        if gens is not None and len(self.closure([s[g] for g in gens])) != len(s):
            raise NotASubgroup("given generators do not generate the subgroup")
        return FiniteGroup(table, gens, labels=[self.labels[g] for g in s]), np.array(s, dtype=np.int64)

    def tuples(self, n: int) -> np.ndarray:
        """All of G^n in lexicographic order, shape (|G|^n, n)."""
        if n == 0:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.indices((self.order,) * n).reshape(n, -1).T
        return grids.astype(np.int64)

    def tuple_index(self, tup: np.ndarray) -> np.ndarray:
        tup = np.asarray(tup)
        n = tup.shape[-1]
        w = self.order ** np.arange(n - 1, -1, -1, dtype=np.int64)
        return tup @ w if n else np.zeros(tup.shape[:-1], dtype=np.int64)

    def product_of(self, tup: np.ndarray) -> np.ndarray:
        """Ordered product g1*g2*...*gk of each row."""
        tup = np.asarray(tup)
        out = np.full(tup.shape[:-1], self.identity, dtype=np.int64)
        for k in range(tup.shape[-1]):
            out = self.table[out, tup[..., k]]
        return out

    @cached_property
    def abelianization_order(self) -> int:
        comm = {self.mul(self.mul(a, b), self.mul(int(self.inverse[a]), int(self.inverse[b]))) for a in range(self.order) for b in range(self.order)}
        derived = self.closure(sorted(comm))
        return self.order // len(derived)

    def to_json(self) -> dict:
        return {"cayley": self.table.tolist(), "generators": self.generators, "relations": self.relations}

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_permutations(cls, perms: Sequence[Sequence[int]], relations: Sequence[Word] = (), name: str | None = None) -> "FiniteGroup":
        """Close permutation generators (0-based images) into a Cayley table.

        Elements are sorted lexicographically as image tuples; (a*b)(x) = a(b(x)).
        """
        perms = [tuple(int(v) for v in p) for p in perms]
        deg = len(perms[0])
        ident = tuple(range(deg))
        seen = {ident}
        queue = deque([ident])
        while queue:
            x = queue.popleft()
            for g in perms:
                y = tuple(x[g[i]] for i in range(deg))
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        elems = sorted(seen)
        pos = {e: i for i, e in enumerate(elems)}
        n = len(elems)
        table = np.zeros((n, n), dtype=np.int64)
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                table[i, j] = pos[tuple(a[b[x]] for x in range(deg))]
        labels = ["".join(map(str, e)) for e in elems]
        return cls(table, [pos[g] for g in perms], relations, labels=labels, name=name)

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        table = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
        gens = [1 % n] if n > 1 else [0]
        return cls(table, gens, [[1] * n] if n > 1 else [], name=f"Z/{n}")

    @classmethod
    def symmetric3(cls) -> "FiniteGroup":
        # s = (0 1), t = (0 1 2): s^2 = t^3 = (st)^2 = 1
        return cls.from_permutations([(1, 0, 2), (1, 2, 0)], relations=[[1, 1], [2, 2, 2], [1, 2, 1, 2]], name="S3")

    @classmethod
    def product(cls, g: "FiniteGroup", h: "FiniteGroup") -> "FiniteGroup":
        n, m = g.order, h.order
        idx = lambda a, b: a * m + b  # noqa: E731
        table = np.zeros((n * m, n * m), dtype=np.int64)
        for a, b, c, d in itertools.product(range(n), range(m), range(n), range(m)):
            table[idx(a, b), idx(c, d)] = idx(g.table[a, c], h.table[b, d])
        gens = [idx(x, h.identity) for x in g.generators] + [idx(g.identity, y) for y in h.generators]
        ng = len(g.generators)
        rels = [list(w) for w in g.relations] + [[s + ng if s > 0 else s - ng for s in w] for w in h.relations]
        rels += [[a, b, -a, -b] for a in range(1, ng + 1) for b in range(ng + 1, ng + len(h.generators) + 1)]
        return cls(table, gens, rels, name=f"{g.name}x{h.name}")

    @classmethod
    def dihedral(cls, n: int) -> "FiniteGroup":
        """Symmetries of an n-gon; r = rotation, s = reflection."""
        r = tuple((i + 1) % n for i in range(n))
        s = tuple((-i) % n for i in range(n))
        return cls.from_permutations([r, s], relations=[[1] * n, [2, 2], [2, 1, 2, 1]], name=f"D{n}")


class GModule:
    """Free Z/p^e-module of rank ``rank`` with G acting by ``action[g]``."""

    def __init__(self, group: FiniteGroup, p: int, e: int, action, check: bool = True):
        self.group = group
        self.p, self.e = int(p), int(e)
        self.mod = self.p**self.e
        act = np.asarray(action, dtype=np.int64) % self.mod
        if act.ndim != 3 or act.shape[0] != group.order or act.shape[1] != act.shape[2]:
            raise ValueError("action must have shape (|G|, r, r)")
        self.rank = act.shape[1]
        self.action = act
        self.action.setflags(write=False)
        if check:
            self._validate()

    def _validate(self) -> None:
        g = self.group
        if not np.array_equal(self.action[g.identity], np.eye(self.rank, dtype=np.int64)):
            raise NotAHomomorphism("identity does not act trivially")
        prods = np.einsum("aij,bjk->abik", self.action, self.action) % self.mod
        if not np.array_equal(prods, self.action[g.table]):
            a, b = np.argwhere(np.any(prods != self.action[g.table], axis=(2, 3)))[0]
            raise NotAHomomorphism(f"action is not multiplicative at ({a},{b})")

    @classmethod
    def from_generators(cls, group: FiniteGroup, p: int, e: int, mats: Sequence) -> "GModule":
        mod = p**e
        mats = [np.asarray(m, dtype=np.int64) % mod for m in mats]
        if len(mats) != len(group.generators):
            raise ValueError("one matrix per generator required")
        r = mats[0].shape[0] if mats else 0
        for w in group.relations:
            x = np.eye(r, dtype=np.int64)
            for s in w:
                m = mats[abs(s) - 1] if s > 0 else inverse_zpe(mats[abs(s) - 1], p, e)
                x = (x @ m) % mod
            if not np.array_equal(x, np.eye(r, dtype=np.int64)):
                raise NotAHomomorphism(f"relation {w} is not respected")
        act = _extend_along_cayley(group, np.eye(r, dtype=np.int64), mats, lambda a, b: (a @ b) % mod)
        return cls(group, p, e, act)

    @classmethod
    def trivial(cls, group: FiniteGroup, p: int, e: int = 1, rank: int = 1) -> "GModule":
        return cls(group, p, e, np.broadcast_to(np.eye(rank, dtype=np.int64), (group.order, rank, rank)).copy(), check=False)

    def restrict(self, embedding: np.ndarray, subgroup: FiniteGroup) -> "GModule":
        return GModule(subgroup, self.p, self.e, self.action[embedding], check=False)

    def fixed_points(self) -> np.ndarray:
        """Basis (columns) of M^G over F_p (fields only)."""
        from .linalg import nullspace_fp

        stack = np.concatenate([a - np.eye(self.rank, dtype=np.int64) for a in self.action], axis=0)
        return nullspace_fp(stack % self.p, self.p)

    def __repr__(self) -> str:
        return f"GModule(rank {self.rank} over Z/{self.mod}, {self.group!r})"


def _extend_along_cayley(group: FiniteGroup, ident, gen_vals, mul):
    """Values on all elements from generator values, by BFS h = parent * gen."""
    vals: list = [None] * group.order
    vals[group.identity] = ident
    queue = deque([group.identity])
    while queue:
        x = queue.popleft()
        for g, v in zip(group.generators, gen_vals):
            y = group.mul(x, g)
            if vals[y] is None:
                vals[y] = mul(vals[x], v)
                queue.append(y)
    return np.stack(vals)


@dataclass(frozen=True)
class Character:
    """A homomorphism G -> (Z/p^e)^x given by its values on all elements."""

    group: FiniteGroup
    p: int
    e: int
    values: tuple[int, ...]

    def __post_init__(self):
        mod = self.p**self.e
        v = np.array(self.values, dtype=np.int64) % mod
        if len(v) != self.group.order:
            raise ValueError("one value per group element required")
        if np.any(v % self.p == 0):
            raise NotAHomomorphism("character values must be units")
        if not np.array_equal((v[:, None] * v[None, :]) % mod, v[self.group.table]):
            raise NotAHomomorphism("character is not multiplicative")
        object.__setattr__(self, "values", tuple(int(x) for x in v))

    @classmethod
    def trivial(cls, group: FiniteGroup, p: int, e: int = 1) -> "Character":
        return cls(group, p, e, (1,) * group.order)

    @classmethod
    def from_generators(cls, group: FiniteGroup, p: int, e: int, gen_values: Sequence[int]) -> "Character":
        mod = p**e
        vals = _extend_along_cayley(group, 1, [int(v) % mod for v in gen_values], lambda a, b: (a * b) % mod)
        return cls(group, p, e, tuple(int(x) for x in vals))

    def inverse(self) -> "Character":
        mod = self.p**self.e
        return Character(self.group, self.p, self.e, tuple(pow(v, -1, mod) for v in self.values))


# ---------------------------------------------------------------------------
# Representations and adjoint modules


class Representation:
    """A homomorphism G -> GL_n(R); ``mats`` has shape (|G|, n, n, d)."""

    def __init__(self, group: FiniteGroup, ring: FiniteLocalRing, mats, check: bool = True):
        self.group, self.ring = group, ring
        self.mats = np.asarray(mats, dtype=np.int64) % ring.mod
        self.mats.setflags(write=False)
        self.n = self.mats.shape[1]
        if check:
            bad = homomorphism_defect(group, ring, self.mats)
            if bad is not None:
                raise NotAHomomorphism(f"rho(x)rho(y) != rho(xy) at {bad}")

    @classmethod
    def from_generators(cls, group: FiniteGroup, ring: FiniteLocalRing, gens: Sequence) -> "Representation":
        gens = [np.asarray(g, dtype=np.int64) % ring.mod for g in gens]
        n = gens[0].shape[0]
        ident = ring.scalar_matrix(n)
        vals = _extend_along_cayley(group, ident, gens, lambda a, b: matmul(ring, a, b))
        return cls(group, ring, vals)

    def residue(self) -> np.ndarray:
        return self.ring.residue(self.mats)

    def is_upper_triangular(self, elements: Sequence[int] | None = None) -> bool:
        idx = range(self.group.order) if elements is None else elements
        low = np.tril_indices(self.n, -1)
        return not np.any(self.mats[list(idx)][:, low[0], low[1]])

    def conjugate(self, g: np.ndarray) -> "Representation":
        """x -> g^{-1} rho(x) g."""
        from .algebra import RMatrix, mat_inverse

        gi = mat_inverse(RMatrix(self.ring, g)).entries
        return Representation(self.group, self.ring, matmul(self.ring, matmul(self.ring, gi, self.mats), g), check=False)


def homomorphism_defect(group: FiniteGroup, ring: FiniteLocalRing, mats: np.ndarray):
    """First pair (x, y) with mats[x] mats[y] != mats[xy], or None."""
    n = group.order
    big = ring.to_big(mats)
    prods = np.einsum("aij,bjk->abik", big, big) % ring.mod
    bad = np.any(prods != big[group.table], axis=(2, 3))
    if bad.any():
        a, b = np.argwhere(bad)[0]
        return int(a), int(b)
    return None


FLAVORS = ("gl", "borel", "nilpotent", "torus")


def flavor_positions(n: int, flavor: str) -> list[tuple[int, int]]:
    if flavor == "gl":
        return [(i, j) for i in range(n) for j in range(n)]
    if flavor == "borel":
        return [(i, j) for i in range(n) for j in range(n) if i <= j]
    if flavor == "nilpotent":
        return [(i, j) for i in range(n) for j in range(n) if i < j]
    if flavor == "torus":
        return [(i, i) for i in range(n)]
    raise ValueError(f"unknown flavor {flavor!r}")


def position_matrix(n: int, d: int, sub: str, sup: str) -> np.ndarray:
    """0/1 matrix sending flavor ``sub`` coordinates to flavor ``sup`` coordinates.

    Coordinates are (position, ring coordinate) with position outermost.  Used
    for the inclusions b -> g, n -> b and the projection b -> t = b/n.
    """
    ps, pt = flavor_positions(n, sub), flavor_positions(n, sup)
    out = np.zeros((len(pt) * d, len(ps) * d), dtype=np.int64)
    for j, pos in enumerate(ps):
        if pos in pt:
            i = pt.index(pos)
            out[i * d : (i + 1) * d, j * d : (j + 1) * d] = np.eye(d, dtype=np.int64)
    return out


def adjoint_module(rho: Representation, flavor: str = "gl", elements: Sequence[int] | None = None) -> GModule:
    """Ad rho: X -> rho(x) X rho(x)^{-1} on the flavor subspace of M_n(R).

    The torus flavor is the quotient b/n, read off as the diagonal.  Coordinates
    are (matrix position, ring coordinate); the rank over Z/p^e is
    (#positions) * rank(R).
    """
    ring, n, d = rho.ring, rho.n, rho.ring.d
    g = rho.group
    if flavor != "gl" and not rho.is_upper_triangular(elements):
        raise NotBorelValued("representation is not upper triangular")
    pos = flavor_positions(n, flavor)
    inv = rho.mats[g.inverse]
    basis = []
    for (i, j) in pos:
        for c in range(d):
            x = np.zeros((n, n, d), dtype=np.int64)
            x[i, j, c] = 1
            basis.append(x)
    basis = np.stack(basis)  # (r, n, n, d)
    # conj[g, b] = rho(g) basis_b rho(g)^{-1}
    conj = matmul(ring, matmul(ring, rho.mats[:, None], basis[None]), inv[:, None])
    rows = np.array([[i, j] for (i, j) in pos], dtype=np.int64)
    coords = conj[:, :, rows[:, 0], rows[:, 1], :]  # (G, r, npos, d)
    act = coords.reshape(g.order, len(basis), -1).transpose(0, 2, 1)
    if flavor in ("borel", "nilpotent"):
        # the subspace must be stable
        keep = set(pos)
        outside = [(i, j) for i in range(n) for j in range(n) if (i, j) not in keep]
        if outside:
            o = np.array(outside)
            if np.any(conj[:, :, o[:, 0], o[:, 1], :]):
                raise NotBorelValued("flavor subspace is not stable")
    return GModule(g, ring.p, ring.e, act)


def twisted_dual(m: GModule, chi: Character) -> GModule:
    """Hom(M, coefficients) with action (g.f)(x) = chi(g) f(g^{-1} x): matrix chi(g) M(g^{-1})^T."""
    vals = np.array(chi.values, dtype=np.int64)
    act = (vals[:, None, None] * m.action[m.group.inverse].transpose(0, 2, 1)) % m.mod
    return GModule(m.group, m.p, m.e, act)


def double_dual_isomorphism(m: GModule, chi1: Character, chi2: Character) -> np.ndarray | None:
    """The evaluation map M -> (M*)* (identity in dual bases) if it is G-equivariant."""
    dd = twisted_dual(twisted_dual(m, chi1), chi2)
    ev = np.eye(m.rank, dtype=np.int64)
    ok = np.array_equal(np.einsum("ij,gjk->gik", ev, m.action) % m.mod, np.einsum("gij,jk->gik", dd.action, ev) % m.mod)
    return ev if ok else None


# ---------------------------------------------------------------------------
# Cochains


def cochain_differential(group: FiniteGroup, m: GModule, n: int) -> np.ndarray:
    """Matrix of d: C^n -> C^{n+1}, shape (|G|^{n+1} r, |G|^n r)."""
    N, r, mod = group.order, m.rank, m.mod
    tup = group.tuples(n + 1)
    rows_t = np.arange(len(tup))
    out = np.zeros((len(tup) * r, N**n * r), dtype=np.int64)
    a = np.arange(r)

    def add_identity(cols_t, sign):
        rr = (rows_t[:, None] * r + a[None, :]).ravel()
        cc = (cols_t[:, None] * r + a[None, :]).ravel()
        np.add.at(out, (rr, cc), sign)

    # g0 . phi(g1..gn)
    cols0 = group.tuple_index(tup[:, 1:])
    blocks = m.action[tup[:, 0]]  # (T, r, r)
    rr = (rows_t[:, None, None] * r + a[None, :, None]) + 0 * a[None, None, :]
    cc = (cols0[:, None, None] * r + a[None, None, :]) + 0 * a[None, :, None]
    np.add.at(out, (rr.ravel(), cc.ravel()), blocks.ravel())
    for i in range(1, n + 1):
        merged = group.table[tup[:, i - 1], tup[:, i]]
        new = np.concatenate([tup[:, : i - 1], merged[:, None], tup[:, i + 1 :]], axis=1)
        add_identity(group.tuple_index(new), (-1) ** i)
    add_identity(group.tuple_index(tup[:, :n]), (-1) ** (n + 1))
    return out % mod


def cochain_complex(group: FiniteGroup, m: GModule, top: int, budget: int | None = None) -> CochainComplex:
    """Inhomogeneous cochains C^0..C^top."""
    check_budget(group.order**top * m.rank, budget, "cochain complex")
    ranks = [group.order**n * m.rank for n in range(top + 1)]
    diffs = {n: cochain_differential(group, m, n) for n in range(top)}
    return CochainComplex(m.p, m.e, 0, ranks, diffs)


def group_cohomology(group: FiniteGroup, m: GModule, i: int):
    """H^i(G, M) (needs cochains up to degree i + 1)."""
    return cohomology(cochain_complex(group, m, i + 1), i)


def cocycle_space(group: FiniteGroup, m: GModule, n: int) -> np.ndarray:
    """Basis (columns) of Z^n over F_p."""
    from .linalg import nullspace_fp

    return nullspace_fp(cochain_differential(group, m, n), m.p)


def restriction_map(group: FiniteGroup, embedding: np.ndarray, m: GModule, subgroup: FiniteGroup, top: int) -> ChainMap:
    """Cochain map C(G, M) -> C(H, M|_H) restricting to tuples in H."""
    src = cochain_complex(group, m, top)
    tgt = cochain_complex(subgroup, m.restrict(embedding, subgroup), top)
    maps = {}
    r = m.rank
    for n in range(top + 1):
        htup = embedding[subgroup.tuples(n)] if n else np.zeros((1, 0), dtype=np.int64)
        cols = group.tuple_index(htup)
        sel = np.zeros((len(htup) * r, group.order**n * r), dtype=np.int64)
        rr = (np.arange(len(htup))[:, None] * r + np.arange(r)).ravel()
        cc = (cols[:, None] * r + np.arange(r)).ravel()
        sel[rr, cc] = 1
        maps[n] = sel
    return ChainMap.cochain(src, tgt, maps)


def restriction(group: FiniteGroup, sub_elements: Sequence[int], m: GModule, i: int) -> np.ndarray:
    """Matrix of res: H^i(G, M) -> H^i(H, M) in canonical cohomology bases."""
    if not group.is_subgroup(sub_elements):
        raise NotASubgroup(f"{sorted(sub_elements)} is not a subgroup")
    sub, emb = group.subgroup(sub_elements)
    f = restriction_map(group, emb, m, sub, i + 1)
    return induced_map(f, -i)


def check_pairing(mm: GModule, nn: GModule, pp: GModule, pairing: np.ndarray) -> None:
    """pairing[c, a, b]: P_c coefficient of m_a (x) n_b; must satisfy g.<m,n> = <gm, gn>."""
    lhs = np.einsum("gck,kab->gcab", pp.action, pairing) % pp.mod
    rhs = np.einsum("cxy,gxa,gyb->gcab", pairing, mm.action, nn.action) % pp.mod
    if not np.array_equal(lhs, rhs):
        g = int(np.argwhere(np.any(lhs != rhs, axis=(1, 2, 3)))[0][0])
        raise PairingNotEquivariant(f"pairing is not equivariant for group element {g}")


def cup_product(group: FiniteGroup, mm: GModule, nn: GModule, pp: GModule, pairing, alpha: np.ndarray, i: int, beta: np.ndarray, j: int, check: bool = True) -> np.ndarray:
    """(a u b)(g1..g_{i+j}) = <a(g1..gi), (g1...gi).b(g_{i+1}..g_{i+j})> at cochain level."""
    pairing = np.asarray(pairing, dtype=np.int64) % pp.mod
    if check:
        check_pairing(mm, nn, pp, pairing)
    N = group.order
    a = np.asarray(alpha).reshape(N**i, mm.rank)
    b = np.asarray(beta).reshape(N**j, nn.rank)
    first = group.tuples(i)
    prod = group.product_of(first)  # (N^i,)
    moved = np.einsum("uxy,vy->uvx", nn.action[prod], b) % pp.mod  # (N^i, N^j, rN)
    out = np.einsum("cxy,ux,uvy->uvc", pairing, a, moved) % pp.mod
    return out.reshape(-1)


def cohomology_class(group: FiniteGroup, m: GModule, i: int, cocycle: np.ndarray, basis: HomologyBasis | None = None) -> np.ndarray:
    basis = basis or cohomology_basis(cochain_complex(group, m, i + 1), i)
    return basis.coords(np.asarray(cocycle) % m.p)

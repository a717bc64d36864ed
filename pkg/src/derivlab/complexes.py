"""Bounded chain and cochain complexes of finite free modules over F_p or Z/p^e.

Chain complexes carry ``d(n): C_n -> C_{n-1}`` as a (rank_{n-1}, rank_n)
matrix acting on column vectors.  Cochain complexes carry
``d(n): C^n -> C^{n+1}``; internally they are the chain complex with
``C_{-n} = C^n``.

Mapping cone convention: ``cone(f)_n = D_n (+) C_{n-1}`` with
``d(x, c) = (d x + f(c), -d c)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .errors import ComplexError
from .linalg import (
    matmul_mod,
    Coordinatizer,
    colspace_fp,
    homology_exponents_zpe,
    kernel_generators_zpe,
    nullspace_fp,
    rank_fp,
    rref_fp,
    snf_zpe,
)


@dataclass(frozen=True)
class Homology:
    """A finite abelian p-group given by invariant-factor exponents.

    Over a field every exponent is 1 and ``dim`` is the dimension.
    """

    p: int
    e: int
    exponents: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.exponents)

    @property
    def order(self) -> int:
        return self.p ** sum(self.exponents)

    @property
    def invariant_factors(self) -> list[int]:
        return [self.p**a for a in self.exponents]

    def is_zero(self) -> bool:
        return not self.exponents

    def to_json(self):
        if self.e == 1:
            return {"dim": self.dim}
        return {"invariant_factors": self.invariant_factors}


def _mat(m, rows: int, cols: int, mod: int) -> np.ndarray:
    a = np.asarray(m, dtype=np.int64).reshape(rows, cols) % mod
    a.setflags(write=False)
    return a


class ChainComplex:
    """Chain complex concentrated in degrees lo..hi."""

    def __init__(self, p: int, e: int, lo: int, ranks: Sequence[int], diffs: Mapping[int, np.ndarray] | None = None, check: bool = True):
        self.p, self.e = int(p), int(e)
        self.mod = self.p**self.e
        self.lo = int(lo)
        self.hi = self.lo + len(ranks) - 1
        self._ranks = [int(r) for r in ranks]
        diffs = dict(diffs or {})
        self._d: dict[int, np.ndarray] = {}
        for n in range(self.lo + 1, self.hi + 1):
            if n in diffs:
                self._d[n] = _mat(diffs[n], self.rank(n - 1), self.rank(n), self.mod)
            else:
                self._d[n] = _mat(np.zeros((self.rank(n - 1), self.rank(n))), self.rank(n - 1), self.rank(n), self.mod)
        extra = set(diffs) - set(self._d)
        for n in extra:
            if np.asarray(diffs[n]).size and np.any(np.asarray(diffs[n]) % self.mod):
                raise ComplexError(f"nonzero differential in degree {n} outside range")
        if check:
            for n in range(self.lo + 2, self.hi + 1):
                if np.any(matmul_mod(self._d[n - 1], self._d[n], self.mod)):
                    raise ComplexError(f"d_{n-1} o d_{n} != 0")

    def rank(self, n: int) -> int:
        if self.lo <= n <= self.hi:
            return self._ranks[n - self.lo]
        return 0

    @property
    def ranks(self) -> list[int]:
        return list(self._ranks)

    def d(self, n: int) -> np.ndarray:
        """Differential C_n -> C_{n-1}."""
        if n in self._d:
            return self._d[n]
        return np.zeros((self.rank(n - 1), self.rank(n)), dtype=np.int64)

    @property
    def is_field(self) -> bool:
        return self.e == 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainComplex) or (self.p, self.e) != (other.p, other.e):
            return False
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return all(self.rank(n) == other.rank(n) for n in range(lo, hi + 1)) and all(
            np.array_equal(self.d(n), other.d(n)) for n in range(lo, hi + 2)
        )

    def __repr__(self) -> str:
        return f"ChainComplex(F_{self.p}^{self.e}, degrees {self.lo}..{self.hi}, ranks {self._ranks})"

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * self.rank(n) for n in range(self.lo, self.hi + 1))

    def to_json(self) -> dict:
        return {
            "kind": "chain",
            "p": self.p,
            "e": self.e,
            "lo": self.lo,
            "ranks": self.ranks,
            "diffs": {str(n): self.d(n).tolist() for n in range(self.lo + 1, self.hi + 1)},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ChainComplex":
        diffs = {int(k): np.asarray(v, dtype=np.int64).reshape(-1, obj["ranks"][int(k) - obj["lo"]]) for k, v in obj.get("diffs", {}).items()}
        return cls(obj["p"], obj["e"], obj["lo"], obj["ranks"], diffs)

    @classmethod
    def concentrated(cls, p: int, e: int, degree: int, rank: int) -> "ChainComplex":
        return cls(p, e, degree, [rank])


class CochainComplex:
    """Cochain complex in degrees lo..hi with ``d(n): C^n -> C^{n+1}``."""

    def __init__(self, p: int, e: int, lo: int, ranks: Sequence[int], diffs: Mapping[int, np.ndarray] | None = None, check: bool = True):
        hi = lo + len(ranks) - 1
        chain_diffs = {-n: m for n, m in (diffs or {}).items()}
        self.chain = ChainComplex(p, e, -hi, list(reversed(list(ranks))), chain_diffs, check=check)

    @classmethod
    def from_chain(cls, c: ChainComplex) -> "CochainComplex":
        obj = cls.__new__(cls)
        obj.chain = c
        return obj

    @property
    def p(self) -> int:
        return self.chain.p

    @property
    def e(self) -> int:
        return self.chain.e

    @property
    def mod(self) -> int:
        return self.chain.mod

    @property
    def lo(self) -> int:
        return -self.chain.hi

    @property
    def hi(self) -> int:
        return -self.chain.lo

    def rank(self, n: int) -> int:
        return self.chain.rank(-n)

    @property
    def ranks(self) -> list[int]:
        return [self.rank(n) for n in range(self.lo, self.hi + 1)]

    def d(self, n: int) -> np.ndarray:
        """Differential C^n -> C^{n+1}."""
        return self.chain.d(-n)

    def __eq__(self, other) -> bool:
        return isinstance(other, CochainComplex) and self.chain == other.chain

    def __repr__(self) -> str:
        return f"CochainComplex(F_{self.p}^{self.e}, degrees {self.lo}..{self.hi}, ranks {self.ranks})"

    def to_json(self) -> dict:
        return {
            "kind": "cochain",
            "p": self.p,
            "e": self.e,
            "lo": self.lo,
            "ranks": self.ranks,
            "diffs": {str(n): self.d(n).tolist() for n in range(self.lo, self.hi)},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CochainComplex":
        lo = obj["lo"]
        diffs = {int(k): np.asarray(v, dtype=np.int64).reshape(-1, obj["ranks"][int(k) - lo]) for k, v in obj.get("diffs", {}).items()}
        return cls(obj["p"], obj["e"], lo, obj["ranks"], diffs)


Complex = ChainComplex | CochainComplex


def _chain(c) -> ChainComplex:
    return c.chain if isinstance(c, CochainComplex) else c


def homology(c: ChainComplex, i: int) -> Homology:
    """H_i = ker d_i / im d_{i+1}; zero outside the degree range."""
    c = _chain(c)
    r = c.rank(i)
    if r == 0:
        return Homology(c.p, c.e, ())
    if c.is_field:
        dim = r - rank_fp(c.d(i), c.p) - rank_fp(c.d(i + 1), c.p)
        return Homology(c.p, 1, (1,) * dim)
    exps = homology_exponents_zpe(c.d(i), c.d(i + 1), c.p, c.e)
    return Homology(c.p, c.e, tuple(exps))


def cohomology(c: CochainComplex, i: int) -> Homology:
    return homology(c.chain, -i)


class HomologyBasis:
    """Canonical cycle representatives of H_i over a field.

    The representatives complete the RREF basis of the boundaries to a basis
    of the cycles; ``coords`` reads off the homology class of any cycle.
    """

    def __init__(self, c: ChainComplex, i: int):
        c = _chain(c)
        if not c.is_field:
            raise NotImplementedError("homology bases are only available over F_p")
        ambient = c.rank(i)
        cycles = nullspace_fp(c.d(i), c.p) if ambient else np.zeros((0, 0), dtype=np.int64)
        boundaries = colspace_fp(c.d(i + 1), c.p) if ambient else np.zeros((0, 0), dtype=np.int64)
        self._setup(c.p, ambient, cycles, boundaries)

    @classmethod
    def from_spaces(cls, p: int, ambient: int, cycles: np.ndarray, boundaries: np.ndarray) -> "HomologyBasis":
        """From already computed cycle and boundary spanning columns (boundaries inside cycles)."""
        obj = cls.__new__(cls)
        boundaries = colspace_fp(boundaries, p) if ambient and boundaries.size else np.zeros((ambient, 0), dtype=np.int64)
        obj._setup(p, ambient, cycles, boundaries)
        return obj

    def _setup(self, p, ambient, cycles, boundaries) -> None:
        self.p = p
        self.ambient = ambient
        self.cycles, self.boundaries = cycles, boundaries
        nb = self.boundaries.shape[1]
        if self.ambient and self.cycles.shape[1]:
            both = np.concatenate([self.boundaries, self.cycles], axis=1)
            piv = _pivot_columns(both, p)
            reps = [j - nb for j in piv if j >= nb]
            self.reps = self.cycles[:, reps]
        else:
            self.reps = np.zeros((self.ambient, 0), dtype=np.int64)
        self.dim = self.reps.shape[1]
        self._coord = Coordinatizer(np.concatenate([self.reps, self.boundaries], axis=1), p) if self.ambient else None

    def coords(self, x: np.ndarray) -> np.ndarray:
        """Class of a cycle (or columns of cycles) in the representative basis."""
        if self._coord is None:
            x = np.asarray(x)
            return np.zeros((0,) + x.shape[1:], dtype=np.int64)
        return self._coord.coords(x)[: self.dim]

    def is_boundary(self, x: np.ndarray) -> bool:
        return not np.any(self.coords(x))


def _pivot_columns(m: np.ndarray, p: int) -> list[int]:
    if m.shape[1] == 0 or m.shape[0] == 0:
        return []
    _, piv = rref_fp(m, p)
    return piv


def cohomology_basis(c: CochainComplex, i: int) -> HomologyBasis:
    return HomologyBasis(c.chain, -i)


class ChainMap:
    """Per-degree matrices ``f(n): C_n -> D_n`` commuting with the differentials."""

    def __init__(self, source: ChainComplex, target: ChainComplex, maps: Mapping[int, np.ndarray], check: bool = True):
        self.source, self.target = _chain(source), _chain(target)
        if (self.source.p, self.source.e) != (self.target.p, self.target.e):
            raise ComplexError("coefficient rings differ")
        mod = self.source.mod
        self._f = {}
        lo = min(self.source.lo, self.target.lo)
        hi = max(self.source.hi, self.target.hi)
        for n in range(lo, hi + 1):
            shape = (self.target.rank(n), self.source.rank(n))
            m = maps.get(n)
            self._f[n] = _mat(np.zeros(shape) if m is None else m, *shape, mod)
        self.lo, self.hi = lo, hi
        if check:
            for n in range(lo, hi + 2):
                lhs = matmul_mod(self.target.d(n), self.f(n), mod)
                rhs = matmul_mod(self.f(n - 1), self.source.d(n), mod)
                if not np.array_equal(lhs, rhs):
                    raise ComplexError(f"chain map does not commute with d in degree {n}")

    def f(self, n: int) -> np.ndarray:
        if n in self._f:
            return self._f[n]
        return np.zeros((self.target.rank(n), self.source.rank(n)), dtype=np.int64)

    @classmethod
    def cochain(cls, source: CochainComplex, target: CochainComplex, maps: Mapping[int, np.ndarray], check: bool = True) -> "ChainMap":
        """Build from cochain-indexed matrices f^n: C^n -> D^n."""
        return cls(source.chain, target.chain, {-n: m for n, m in maps.items()}, check=check)

    @classmethod
    def identity(cls, c: ChainComplex) -> "ChainMap":
        c = _chain(c)
        return cls(c, c, {n: np.eye(c.rank(n), dtype=np.int64) for n in range(c.lo, c.hi + 1)})

    @classmethod
    def zero(cls, c: ChainComplex, d: ChainComplex) -> "ChainMap":
        return cls(c, d, {})

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self o other."""
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        return ChainMap(other.source, self.target, {n: self.f(n) @ other.f(n) for n in range(lo, hi + 1)})


def suspend(c: ChainComplex) -> ChainComplex:
    """(Sigma C)_n = C_{n-1} with differential -d."""
    c = _chain(c)
    return ChainComplex(c.p, c.e, c.lo + 1, c.ranks, {n + 1: -c.d(n) for n in range(c.lo + 1, c.hi + 1)})


def cone(f: ChainMap) -> ChainComplex:
    """cone(f)_n = D_n (+) C_{n-1}, d(x, c) = (d x + f(c), -d c)."""
    C, D = f.source, f.target
    lo = min(D.lo, C.lo + 1)
    hi = max(D.hi, C.hi + 1)
    ranks = [D.rank(n) + C.rank(n - 1) for n in range(lo, hi + 1)]
    diffs = {}
    for n in range(lo + 1, hi + 1):
        top = np.concatenate([D.d(n), f.f(n - 1)], axis=1)
        bottom = np.concatenate([np.zeros((C.rank(n - 2), D.rank(n)), dtype=np.int64), -C.d(n - 1)], axis=1)
        diffs[n] = np.concatenate([top, bottom], axis=0)
    return ChainComplex(C.p, C.e, lo, ranks, diffs)


def cone_maps(f: ChainMap) -> tuple[ChainComplex, ChainMap, ChainMap]:
    """cone(f) with the inclusion D -> cone and projection cone -> Sigma C."""
    C, D = f.source, f.target
    k = cone(f)
    inc = {}
    proj = {}
    for n in range(k.lo, k.hi + 1):
        inc[n] = np.concatenate([np.eye(D.rank(n), dtype=np.int64), np.zeros((C.rank(n - 1), D.rank(n)), dtype=np.int64)], axis=0)
        proj[n] = np.concatenate([np.zeros((C.rank(n - 1), D.rank(n)), dtype=np.int64), np.eye(C.rank(n - 1), dtype=np.int64)], axis=1)
    return k, ChainMap(D, k, inc), ChainMap(k, suspend(C), proj)


def induced_map(f: ChainMap, i: int, src: HomologyBasis | None = None, tgt: HomologyBasis | None = None) -> np.ndarray:
    """Matrix of H_i(f) in the canonical homology bases (fields only)."""
    src = src or HomologyBasis(f.source, i)
    tgt = tgt or HomologyBasis(f.target, i)
    if src.dim == 0 or tgt.dim == 0:
        return np.zeros((tgt.dim, src.dim), dtype=np.int64)
    images = (f.f(i) @ src.reps) % f.source.p
    return tgt.coords(images)


def exactness_defects(maps: Sequence[np.ndarray], dims: Sequence[int], p: int) -> list[int]:
    """Check a sequence V_0 -> V_1 -> ... at the interior nodes.

    ``maps[k]`` is V_k -> V_{k+1}; returns indices of nodes where im != ker.
    """
    bad = []
    for k in range(1, len(maps)):
        a, b = maps[k - 1], maps[k]
        dim = dims[k]
        if np.any((b @ a) % p):
            bad.append(k)
            continue
        if rank_fp(a, p) != dim - rank_fp(b, p):
            bad.append(k)
    return bad


def cone_long_exact_sequence(f: ChainMap, lo: int | None = None, hi: int | None = None) -> dict:
    """Verify exactness of ... H_n(C) -> H_n(D) -> H_n(cone) -> H_{n-1}(C) -> ...

    Degrees strictly inside the cone's range are checked (the ends can be
    truncation artefacts when the complexes are themselves truncated).
    """
    k, inc, proj = cone_maps(f)
    C, D = f.source, f.target
    p = C.p
    lo = k.lo if lo is None else lo
    hi = k.hi if hi is None else hi
    maps, dims, labels = [], [], []
    sc = proj.target
    for n in range(hi, lo - 1, -1):
        bC, bD, bK = HomologyBasis(C, n), HomologyBasis(D, n), HomologyBasis(k, n)
        bS = HomologyBasis(sc, n)
        # H_{n}(Sigma C) uses the same cycles as H_{n-1}(C)
        bCm = HomologyBasis(C, n - 1)
        dims += [bC.dim, bD.dim, bK.dim]
        labels += [f"H{n}(C)", f"H{n}(D)", f"H{n}(cone)"]
        maps.append(induced_map(f, n, bC, bD))
        maps.append(induced_map(inc, n, bD, bK))
        conn = induced_map(proj, n, bK, bS)
        # identify H_n(Sigma C) with H_{n-1}(C): same underlying vectors
        if bS.dim:
            conn = bCm.coords((bS.reps @ conn) % p)
        else:
            conn = np.zeros((bCm.dim, bK.dim), dtype=np.int64)
        maps.append(conn)
    dims.append(HomologyBasis(C, lo - 1).dim)
    bad = exactness_defects(maps, dims, p)
    return {"nodes": labels, "dims": dims, "defects": [labels[i] for i in bad if i < len(labels)]}


def internal_hom(c: ChainComplex, d: ChainComplex) -> ChainComplex:
    """Mapping complex [C, D]_n = prod_m Hom(C_m, D_{m+n}).

    Differential (df)_m = d_D f_m - (-1)^n f_{m-1} d_C.  Basis: components by
    increasing m, each Hom matrix flattened row-major.
    """
    c, d = _chain(c), _chain(d)
    if (c.p, c.e) != (d.p, d.e):
        raise ComplexError("coefficient rings differ")
    lo, hi = d.lo - c.hi, d.hi - c.lo

    def layout(n):
        offs, pos = {}, 0
        for m in range(c.lo, c.hi + 1):
            size = d.rank(m + n) * c.rank(m)
            offs[m] = (pos, size)
            pos += size
        return offs, pos

    layouts = {n: layout(n) for n in range(lo - 1, hi + 1)}
    ranks = [layouts[n][1] for n in range(lo, hi + 1)]
    diffs = {}
    for n in range(lo + 1, hi + 1):
        src, ns = layouts[n]
        tgt, nt = layouts[n - 1]
        mat = np.zeros((nt, ns), dtype=np.int64)
        sign = -1 if n % 2 == 0 else 1  # -(-1)^n
        for m in range(c.lo, c.hi + 1):
            to, tsize = tgt[m]
            if tsize == 0:
                continue
            so, ssize = src[m]
            if ssize:
                mat[to : to + tsize, so : so + ssize] += np.kron(d.d(m + n), np.eye(c.rank(m), dtype=np.int64))
            if m - 1 in src:
                so2, ssize2 = src[m - 1]
                if ssize2:
                    mat[to : to + tsize, so2 : so2 + ssize2] += sign * np.kron(
                        np.eye(d.rank(m - 1 + n), dtype=np.int64), d_c_T(c, m)
                    )
        diffs[n] = mat
    return ChainComplex(c.p, c.e, lo, ranks, diffs)


def d_c_T(c: ChainComplex, m: int) -> np.ndarray:
    return c.d(m).T


def hom_components(c: ChainComplex, d: ChainComplex, n: int, vec: np.ndarray) -> dict[int, np.ndarray]:
    """Split a vector of [C, D]_n into its Hom(C_m, D_{m+n}) matrices."""
    c, d = _chain(c), _chain(d)
    out, pos = {}, 0
    for m in range(c.lo, c.hi + 1):
        r, s = d.rank(m + n), c.rank(m)
        out[m] = np.asarray(vec[pos : pos + r * s]).reshape(r, s)
        pos += r * s
    return out


def _free_kernel_basis(m: np.ndarray, p: int, e: int) -> np.ndarray:
    if e == 1:
        return nullspace_fp(m, p)
    gens, orders = kernel_generators_zpe(m, p, e)
    if any(a != e for a in orders):
        raise ComplexError("kernel is not a free Z/p^e-module")
    return gens


def _free_cokernel(m: np.ndarray, p: int, e: int) -> np.ndarray:
    """Projection matrix onto a free complement of im m (field case only)."""
    if e != 1:
        snf = snf_zpe(m, p, e)
        if any(0 < a < e for a in snf.exponents):
            raise ComplexError("cokernel is not free")
        raise NotImplementedError("cokernel truncation over Z/p^e")
    rows = m.shape[0]
    img = colspace_fp(m, p)
    ann = nullspace_fp(img.T, p).T if img.shape[1] else np.eye(rows, dtype=np.int64)
    return ann % p


def truncate(c, mode: str):
    """Good truncation.

    Chain complexes: ``tau_ge0`` keeps degrees >= 0 with C_0 replaced by
    ker(C_0 -> C_{-1}); ``tau_le0`` keeps degrees <= 0 with C_0 replaced by
    coker(C_1 -> C_0).  Cochain complexes use cochain degrees: ``tau_le0``
    keeps C^i for i < 0 and ker(d^0) in degree 0, ``tau_ge0`` the dual.
    """
    if isinstance(c, CochainComplex):
        flipped = {"tau_le0": "tau_ge0", "tau_ge0": "tau_le0"}[mode]
        return CochainComplex.from_chain(truncate(c.chain, flipped))
    p, e = c.p, c.e
    if mode == "tau_ge0":
        if c.lo >= 0:
            return c
        if c.hi < 0:
            return ChainComplex(p, e, 0, [0])
        k = _free_kernel_basis(c.d(0), p, e) if c.rank(0) else np.zeros((0, 0), dtype=np.int64)
        ranks = [k.shape[1]] + [c.rank(n) for n in range(1, c.hi + 1)]
        diffs = {n: c.d(n) for n in range(2, c.hi + 1)}
        if c.hi >= 1:
            # d_1 lands in the kernel; express it in the kernel basis
            if k.shape[1]:
                diffs[1] = Coordinatizer(k, p).coords(c.d(1)) if e == 1 else _coords_free(k, c.d(1), p, e)
            else:
                diffs[1] = np.zeros((0, c.rank(1)), dtype=np.int64)
        return ChainComplex(p, e, 0, ranks, diffs)
    if mode == "tau_le0":
        if c.hi <= 0:
            return c
        if c.lo > 0:
            return ChainComplex(p, e, 0, [0])
        q = _free_cokernel(c.d(1), p, e) if c.rank(0) else np.zeros((0, 0), dtype=np.int64)
        ranks = [c.rank(n) for n in range(c.lo, 0)] + [q.shape[0]]
        diffs = {n: c.d(n) for n in range(c.lo + 1, 0)}
        if c.lo <= -1:
            # d_0 kills im d_1, so it factors through the quotient: pick a section
            sec = _section(q, p)
            diffs[0] = (c.d(0) @ sec) % p
        return ChainComplex(p, e, c.lo, ranks, diffs)
    raise ValueError(f"unknown truncation mode {mode!r}")


def _section(q: np.ndarray, p: int) -> np.ndarray:
    """A right inverse of the surjection q (field case)."""
    from .linalg import solve_fp

    sol = solve_fp(q, np.eye(q.shape[0], dtype=np.int64), p)
    assert sol is not None
    return sol


def _coords_free(basis: np.ndarray, vecs: np.ndarray, p: int, e: int) -> np.ndarray:
    mod = p**e
    snf = snf_zpe(basis, p, e)
    # basis columns span a free summand: L basis R = [I; 0]
    k = basis.shape[1]
    y = (snf.left @ vecs) % mod
    if np.any(y[k:]):
        raise ComplexError("vectors not in span")
    return (snf.right @ y[:k]) % mod


def cochain_complex_from_chain(c: ChainComplex) -> CochainComplex:
    return CochainComplex.from_chain(c)

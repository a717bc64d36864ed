"""Finite local rings presented by structure constants over Z/p^e, and matrices over them.

An element of a ring of rank d is a length-d coordinate vector over Z/p^e.
Elements are ordered lexicographically by coordinates; so are matrices,
row-major by entry.  A matrix over the ring can also be viewed as a
``(n*d, n*d)`` matrix over Z/p^e through the regular representation
(:meth:`FiniteLocalRing.to_big`); products and inverses are computed there.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    NoUnit,
    NotAssociative,
    NotCommutative,
    NotInvertible,
    NotLocal,
    RingError,
)
from .linalg import SmithForm, inverse_zpe, snf_zpe  # noqa: F401  (re-exported)

DEFAULT_BUDGET = 10**7


def default_budget() -> int:
    env = os.environ.get("DERIVLAB_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def check_budget(needed: int, budget: int | None, what: str = "enumeration") -> None:
    budget = default_budget() if budget is None else budget
    if needed > budget:
        raise BudgetExceeded(needed, budget, what)


def det_mod_p(mats: np.ndarray, p: int) -> np.ndarray:
    """Batched determinant mod p of (..., n, n) integer matrices by elimination."""
    mats = np.asarray(mats, dtype=np.int64) % p
    shape, n = mats.shape[:-2], mats.shape[-1]
    if n == 0:
        return np.ones(shape, dtype=np.int64)
    a = mats.reshape(-1, n, n).copy()
    det = np.ones(a.shape[0], dtype=np.int64)
    rows = np.arange(a.shape[0])
    inv = np.array([0] + [pow(x, -1, p) for x in range(1, p)], dtype=np.int64)
    for c in range(n):
        nz = a[:, c:, c] != 0
        has = nz.any(axis=1)
        det[~has] = 0
        piv = c + np.argmax(nz, axis=1)
        swap = has & (piv != c)
        det[swap] = (-det[swap]) % p
        top = a[rows, c].copy()
        a[rows, c] = a[rows, piv]
        a[rows, piv] = top
        pv = a[:, c, c]
        det = (det * pv) % p
        scale = inv[pv]
        factors = (a[:, c + 1 :, c] * scale[:, None]) % p
        a[:, c + 1 :, :] = (a[:, c + 1 :, :] - factors[:, :, None] * a[:, c, None, :]) % p
    return det.reshape(shape)


class FiniteLocalRing:
    """Commutative local ring, free of rank ``d`` over Z/p^e, with residue field F_p.

    ``mul[a, b, c]`` is the c-th coordinate of basis_a * basis_b.
    """

    def __init__(self, p: int, e: int, mul, one, name: str | None = None):
        if p < 3 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise RingError(f"p must be an odd prime, got {p}")
        if e < 1:
            raise RingError("exponent e must be >= 1")
        self.p = int(p)
        self.e = int(e)
        self.mod = self.p**self.e
        mul = np.asarray(mul, dtype=np.int64)
        one = np.asarray(one, dtype=np.int64)
        d = one.shape[0]
        if mul.shape != (d, d, d):
            raise RingError(f"structure constants must have shape ({d},{d},{d}), got {mul.shape}")
        self.d = d
        self.mul = mul % self.mod
        self.one = one % self.mod
        self.name = name
        self._validate()

    # -- construction ------------------------------------------------------

    def _validate(self) -> None:
        s, mod, d = self.mul, self.mod, self.d
        if not np.array_equal(s, s.transpose(1, 0, 2)):
            a, b = np.argwhere(np.any(s != s.transpose(1, 0, 2), axis=2))[0]
            raise NotCommutative(f"basis pair ({a},{b}) does not commute")
        # (e_a e_b) e_c vs e_a (e_b e_c)
        left = np.einsum("abk,kcf->abcf", s, s) % mod
        right = np.einsum("bck,akf->abcf", s, s) % mod
        bad = np.argwhere(np.any(left != right, axis=3))
        if len(bad):
            a, b, c = bad[0]
            raise NotAssociative(f"basis triple ({a},{b},{c}) violates associativity")
        if not np.array_equal(np.einsum("a,abc->bc", self.one, s) % mod, np.eye(d, dtype=np.int64)):
            raise NoUnit("declared unit does not act as the identity")
        if self.size > 10**6:
            raise RingError("ring too large for exhaustive validation")
        units = self.unit_mask
        nonunits = self.elements[~units]
        # grow the additive span of the non-units; local iff it adds no units
        inspan = np.zeros(self.size, dtype=bool)
        inspan[self.index(self.zero)] = True
        span = self.zero[None, :]
        for x in nonunits:
            if inspan[self.index(x)]:
                continue
            span = np.concatenate([(span + k * x) % mod for k in range(mod)])
            span = self.elements[np.unique(self.indices(span))]
            inspan[self.indices(span)] = True
            if np.any(units[self.indices(span)]):
                raise NotLocal("non-units are not closed under addition")
        if self.size // len(nonunits) != self.p:
            raise RingError(f"residue field has {self.size // len(nonunits)} elements, expected prime field F_{self.p}")

    @classmethod
    def from_spec(cls, spec: dict, name: str | None = None) -> "FiniteLocalRing":
        d = int(spec["rank"])
        mul = np.asarray(spec["mul"], dtype=np.int64)
        if mul.shape != (d, d, d):
            raise RingError(f"'mul' must be {d}x{d}x{d}")
        one = spec.get("one", [1] + [0] * (d - 1))
        if len(one) != d:
            raise RingError("'one' has wrong length")
        return cls(int(spec["p"]), int(spec["e"]), mul, one, name=name)

    def to_spec(self) -> dict:
        return {
            "p": self.p,
            "e": self.e,
            "rank": self.d,
            "mul": self.mul.tolist(),
            "one": self.one.tolist(),
        }

    def __repr__(self) -> str:
        label = self.name or f"rank {self.d} over Z/{self.mod}"
        return f"FiniteLocalRing({label})"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteLocalRing)
            and self.p == other.p
            and self.e == other.e
            and np.array_equal(self.mul, other.mul)
            and np.array_equal(self.one, other.one)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.mul.tobytes(), self.one.tobytes()))

    # -- elements ----------------------------------------------------------

    @property
    def size(self) -> int:
        return self.mod**self.d

    @cached_property
    def elements(self) -> np.ndarray:
        grid = np.array(list(itertools.product(range(self.mod), repeat=self.d)), dtype=np.int64)
        return grid.reshape(self.size, self.d)

    def index(self, x) -> int:
        i = 0
        for c in np.asarray(x) % self.mod:
            i = i * self.mod + int(c)
        return i

    def indices(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs) % self.mod
        weights = self.mod ** np.arange(self.d - 1, -1, -1, dtype=np.int64)
        return xs @ weights

    @property
    def zero(self) -> np.ndarray:
        return np.zeros(self.d, dtype=np.int64)

    def scalar(self, c: int) -> np.ndarray:
        return (int(c) * self.one) % self.mod

    def add(self, x, y) -> np.ndarray:
        return (np.asarray(x) + np.asarray(y)) % self.mod

    def neg(self, x) -> np.ndarray:
        return (-np.asarray(x)) % self.mod

    def times(self, x, y) -> np.ndarray:
        return np.einsum("...a,...b,abc->...c", np.asarray(x), np.asarray(y), self.mul) % self.mod

    def reg(self, x) -> np.ndarray:
        """Matrix of multiplication by x: reg(x) @ y == x * y."""
        return np.einsum("...a,abc->...cb", np.asarray(x), self.mul) % self.mod

    @cached_property
    def unit_mask(self) -> np.ndarray:
        regs = self.reg(self.elements)
        return det_mod_p(regs, self.p) != 0

    def is_unit(self, x) -> bool:
        return bool(det_mod_p(self.reg(x), self.p) != 0)

    @cached_property
    def n_units(self) -> int:
        return int(self.unit_mask.sum())

    @cached_property
    def residue_table(self) -> np.ndarray:
        """residue_table[index(x)] = image of x in F_p."""
        out = np.full(self.size, -1, dtype=np.int64)
        nonunit = ~self.unit_mask
        for c in range(self.p):
            shifted = self.indices((self.elements - c * self.one) % self.mod)
            hit = nonunit[shifted]
            out[hit] = c
        assert (out >= 0).all()
        return out

    def residue(self, x) -> np.ndarray:
        """Entrywise residue of an array of elements (last axis = coordinates)."""
        return self.residue_table[self.indices(x)]

    def inverse(self, x) -> np.ndarray:
        if not self.is_unit(x):
            raise NotInvertible("element is not a unit")
        inv = inverse_zpe(self.reg(x), self.p, self.e)
        return (inv @ self.one) % self.mod

    @cached_property
    def maximal_ideal(self) -> np.ndarray:
        return self.elements[~self.unit_mask]

    @cached_property
    def maximal_ideal_basis(self) -> list[np.ndarray]:
        """Greedy Z/p^e-generators of the maximal ideal, in element order."""
        gens: list[np.ndarray] = []
        span = {self.index(self.zero)}
        for x in self.maximal_ideal:
            if self.index(x) in span:
                continue
            gens.append(x)
            new = set()
            for s in span:
                base = self.elements[s]
                for k in range(self.mod):
                    new.add(self.index((base + k * x) % self.mod))
            span = new
        return gens

    @property
    def is_field(self) -> bool:
        return self.size == self.p

    # -- matrices ----------------------------------------------------------

    def to_big(self, x: np.ndarray) -> np.ndarray:
        """(..., n, n, d) matrices over the ring -> (..., n*d, n*d) over Z/p^e."""
        x = np.asarray(x)
        n = x.shape[-2]
        big = np.einsum("...ija,abc->...icjb", x, self.mul) % self.mod
        return big.reshape(x.shape[:-3] + (n * self.d, n * self.d))

    def from_big(self, big: np.ndarray) -> np.ndarray:
        big = np.asarray(big)
        n = big.shape[-1] // self.d
        blocks = big.reshape(big.shape[:-2] + (n, self.d, n, self.d))
        return np.einsum("...icjb,b->...ijc", blocks, self.one) % self.mod

    def scalar_matrix(self, n: int, c: int = 1) -> np.ndarray:
        out = np.zeros((n, n, self.d), dtype=np.int64)
        for i in range(n):
            out[i, i] = self.scalar(c)
        return out

    def lift_residue_matrix(self, m) -> np.ndarray:
        """Canonical lift of an F_p matrix: entry c goes to c * 1."""
        m = np.asarray(m, dtype=np.int64) % self.p
        return (m[..., None] * self.one) % self.mod


def matrix_key(x: np.ndarray) -> tuple[int, ...]:
    return tuple(int(v) for v in np.asarray(x).ravel())


@dataclass(frozen=True, eq=False)
class RMatrix:
    """Matrix over a FiniteLocalRing; ``entries`` has shape (rows, cols, d)."""

    ring: FiniteLocalRing
    entries: np.ndarray

    def __post_init__(self):
        ent = np.asarray(self.entries, dtype=np.int64) % self.ring.mod
        if ent.ndim != 3 or ent.shape[2] != self.ring.d:
            raise ValueError("entries must have shape (rows, cols, d)")
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)

    @classmethod
    def identity(cls, ring: FiniteLocalRing, n: int) -> "RMatrix":
        return cls(ring, ring.scalar_matrix(n))

    @classmethod
    def from_residue(cls, ring: FiniteLocalRing, m) -> "RMatrix":
        return cls(ring, ring.lift_residue_matrix(m))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape[0], self.entries.shape[1]

    def __matmul__(self, other: "RMatrix") -> "RMatrix":
        prod = np.einsum("ika,kjb,abc->ijc", self.entries, other.entries, self.ring.mul)
        return RMatrix(self.ring, prod)

    def __add__(self, other: "RMatrix") -> "RMatrix":
        return RMatrix(self.ring, self.entries + other.entries)

    def __sub__(self, other: "RMatrix") -> "RMatrix":
        return RMatrix(self.ring, self.entries - other.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, RMatrix) and self.ring == other.ring and np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash(self.key())

    def key(self) -> tuple[int, ...]:
        return matrix_key(self.entries)

    def residue(self) -> np.ndarray:
        return self.ring.residue(self.entries)

    def big(self) -> np.ndarray:
        return self.ring.to_big(self.entries)

    def trace(self) -> np.ndarray:
        return np.einsum("iic->c", self.entries) % self.ring.mod

    def __repr__(self) -> str:
        return f"RMatrix({self.entries.tolist()})"


def mat_inverse(m: RMatrix) -> RMatrix:
    """Exact inverse; raises NotInvertible when the residue matrix is singular."""
    rows, cols = m.shape
    if rows != cols:
        raise ValueError("square matrix required")
    ring = m.ring
    if det_mod_p(m.residue(), ring.p) == 0:
        raise NotInvertible("residue matrix is singular")
    big_inv = inverse_zpe(m.big(), ring.p, ring.e)
    return RMatrix(ring, ring.from_big(big_inv))


# ---------------------------------------------------------------------------
# standard rings


def prime_field(p: int) -> FiniteLocalRing:
    return FiniteLocalRing(p, 1, [[[1]]], [1], name=f"F_{p}")


def z_mod_pe(p: int, e: int) -> FiniteLocalRing:
    return FiniteLocalRing(p, e, [[[1]]], [1], name=f"Z/{p**e}")


def truncated_poly(p: int, k: int) -> FiniteLocalRing:
    """F_p[x]/(x^k); k = 2 gives the dual numbers."""
    mul = np.zeros((k, k, k), dtype=np.int64)
    for a in range(k):
        for b in range(k):
            if a + b < k:
                mul[a, b, a + b] = 1
    one = [1] + [0] * (k - 1)
    name = f"F_{p}[eps]" if k == 2 else f"F_{p}[x]/x^{k}"
    return FiniteLocalRing(p, 1, mul, one, name=name)


def dual_numbers(p: int) -> FiniteLocalRing:
    return truncated_poly(p, 2)


# ---------------------------------------------------------------------------
# small groups of matrices


def _sorted_rows(arr: np.ndarray) -> np.ndarray:
    flat = arr.reshape(arr.shape[0], -1)
    order = np.lexsort(flat.T[::-1])
    return arr[order]


def group_array(kind: str, ring: FiniteLocalRing, n: int = 1, budget: int | None = None) -> np.ndarray:
    """All elements of Units / GLn / KernelGLn as an (N, n, n, d) array, lexicographic."""
    kind = kind.lower()
    if kind == "units":
        check_budget(ring.size, budget)
        return ring.elements[ring.unit_mask].reshape(-1, 1, 1, ring.d)
    if kind == "gln":
        check_budget(ring.size ** (n * n), budget)
        idx = np.array(list(itertools.product(range(ring.size), repeat=n * n)), dtype=np.int64)
        idx = idx.reshape(-1, n * n)
        mats = ring.elements[idx].reshape(-1, n, n, ring.d)
        res = ring.residue(mats)
        keep = det_mod_p(res, ring.p) != 0
        return mats[keep]
    if kind == "kernelgln":
        m = ring.maximal_ideal
        check_budget(len(m) ** (n * n), budget)
        idx = np.array(list(itertools.product(range(len(m)), repeat=n * n)), dtype=np.int64)
        idx = idx.reshape(-1, n * n)
        mats = (m[idx].reshape(-1, n, n, ring.d) + ring.scalar_matrix(n)) % ring.mod
        return _sorted_rows(mats)
    raise ValueError(f"unknown group kind {kind!r}")


def enumerate_small_group(kind: str, ring: FiniteLocalRing, n: int = 1, budget: int | None = None) -> list[RMatrix]:
    """Complete deterministic list of Units, GLn or KernelGLn = ker(GL_n(A) -> GL_n(k))."""
    return [RMatrix(ring, x) for x in group_array(kind, ring, n, budget)]


def ring_from_spec(spec: dict) -> FiniteLocalRing:
    return FiniteLocalRing.from_spec(spec)


def fp_structure(ring: FiniteLocalRing, elements: Iterable[np.ndarray]) -> tuple[list[np.ndarray], dict]:
    """F_p-basis of an additive subgroup killed by p, and a coordinate lookup.

    Returns (basis, coords) where coords maps ``ring.index(x)`` to the
    coordinate tuple of x in that basis.
    """
    elems = [np.asarray(x) % ring.mod for x in elements]
    p = ring.p
    basis: list[np.ndarray] = []
    coords: dict[int, tuple[int, ...]] = {ring.index(ring.zero): ()}
    for x in elems:
        if ring.index(x) in coords:
            continue
        if ring.index((p * x) % ring.mod) != ring.index(ring.zero):
            raise ValueError("subgroup is not killed by p")
        basis.append(x)
        new: dict[int, tuple[int, ...]] = {}
        for idx, c in coords.items():
            base = ring.elements[idx]
            for k in range(p):
                new[ring.index((base + k * x) % ring.mod)] = c + (k,)
        coords = new
    k = len(basis)
    coords = {i: c + (0,) * (k - len(c)) for i, c in coords.items()}
    if len(coords) != len({ring.index(x) for x in elems} | {ring.index(ring.zero)}):
        raise ValueError("element set is not an additive subgroup")
    return basis, coords


def ideal_elements(ring: FiniteLocalRing, gens: Sequence[np.ndarray]) -> np.ndarray:
    """Elements of the ideal generated by ``gens``, in element order."""
    members = {ring.index(ring.zero)}
    for g in gens:
        members |= set(ring.indices(ring.times(ring.elements, g)).tolist())
    changed = True
    while changed:
        cur = np.array(sorted(members))
        sums = ring.indices(ring.elements[cur][:, None, :] + ring.elements[cur][None, :, :])
        new = members | set(np.unique(sums).tolist())
        changed = len(new) != len(members)
        members = new
    return ring.elements[sorted(members)]


def matmul(ring: FiniteLocalRing, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched product of matrices over ``ring`` (last axis = coordinates)."""
    return np.einsum("...ika,...kjb,abc->...ijc", a, b, ring.mul) % ring.mod

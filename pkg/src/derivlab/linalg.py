"""Exact linear algebra over F_p and Z/p^e.

Dense matrices are numpy int64 arrays holding canonical residues.  Prime
field work (rank, reduced row echelon form) is delegated to FLINT's
``nmod_mat``; everything over Z/p^e with e > 1 goes through the Smith
normal form routine in :func:`snf_zpe`, which is written here because
FLINT has no local-ring SNF.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import flint
import numpy as np


def as_mod(m, mod: int) -> np.ndarray:
    return np.asarray(m, dtype=np.int64) % mod


def matmul_mod(a: np.ndarray, b: np.ndarray, mod: int) -> np.ndarray:
    """(a @ b) % mod, through float64 BLAS when every partial sum is exact."""
    a = np.asarray(a) % mod
    b = np.asarray(b) % mod
    if a.size == 0 or b.size == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    if (mod - 1) ** 2 * a.shape[1] < 2**52:
        return (a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64) % mod
    return (a @ b) % mod


def _to_flint(m: np.ndarray, p: int) -> flint.nmod_mat:
    r, c = m.shape
    return flint.nmod_mat(r, c, (m % p).ravel().tolist(), p)


def _from_flint(fm: flint.nmod_mat) -> np.ndarray:
    r, c = fm.nrows(), fm.ncols()
    if r == 0 or c == 0:
        return np.zeros((r, c), dtype=np.int64)
    return np.array([int(x) for x in fm.entries()], dtype=np.int64).reshape(r, c)


def rank_fp(m: np.ndarray, p: int) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return _to_flint(m, p).rank()


def _rref_direct(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    r, c = m.shape
    red, rk = _to_flint(m, p).rref()
    if rk == 0:
        return np.zeros((0, c), dtype=np.int64), []
    flat = np.fromiter(map(int, red.entries()), dtype=np.int64, count=r * c)
    rows = flat.reshape(r, c)[:rk].copy()
    pivots = [int(np.flatnonzero(rows[i])[0]) for i in range(rk)]
    return rows, pivots


def _null_from_rref(red: np.ndarray, piv: list[int], c: int, p: int) -> np.ndarray:
    pivset = set(piv)
    free = [j for j in range(c) if j not in pivset]
    basis = np.zeros((c, len(free)), dtype=np.int64)
    if free:
        basis[free, np.arange(len(free))] = 1
        if piv:
            basis[piv, :] = (-red[:, free]) % p
    return basis


COMPRESS_MIN = 200_000  # entries; tall matrices above this are row-compressed first


def rref_fp(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p, nonzero rows only, plus pivot columns.

    Tall matrices are first multiplied by a fixed pseudo-random matrix S with
    a few more rows than columns.  The RREF of S m is that of m exactly when
    the row spaces agree, which is checked by m N = 0 for the kernel N of
    S m; on failure the direct computation is used.
    """
    m = np.asarray(m) % p
    r, c = m.shape
    if r == 0 or c == 0:
        return np.zeros((0, c), dtype=np.int64), []
    if r > c + 16 and r * c > COMPRESS_MIN:
        s = np.random.default_rng(r * 7919 + c).integers(0, p, (c + 8, r))
        red, piv = _rref_direct(matmul_mod(s, m, p), p)
        null = _null_from_rref(red, piv, c, p)
        if not null.shape[1] or not matmul_mod(m, null, p).any():
            return red, piv
    return _rref_direct(m, p)


def nullspace_fp(m: np.ndarray, p: int) -> np.ndarray:
    """Canonical basis of {x : m x = 0} as columns (one per free column of the RREF)."""
    m = np.asarray(m)
    red, piv = rref_fp(m, p)
    return _null_from_rref(red, piv, m.shape[1], p)


def colspace_fp(m: np.ndarray, p: int) -> np.ndarray:
    """Canonical basis (columns) of the column space: transposed RREF rows of m^T."""
    m = np.asarray(m)
    red, _ = rref_fp(m.T, p)
    return red.T.copy()


def left_annihilator_fp(s: np.ndarray, p: int) -> np.ndarray:
    """Rows spanning {y : y s = 0}; a matrix whose kernel is exactly span(columns of s)."""
    s = np.asarray(s)
    if s.shape[1] == 0:
        return np.eye(s.shape[0], dtype=np.int64)
    return nullspace_fp(s.T, p).T.copy()


def solve_fp(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """One solution x of a x = b (b may have several columns), or None."""
    a = np.asarray(a) % p
    b = np.asarray(b) % p
    vec = b.ndim == 1
    if vec:
        b = b[:, None]
    rows, cols = a.shape
    aug = np.concatenate([a, b], axis=1)
    red, piv = rref_fp(aug, p)
    if any(pc >= cols for pc in piv):
        return None
    x = np.zeros((cols, b.shape[1]), dtype=np.int64)
    for i, pc in enumerate(piv):
        x[pc] = red[i, cols:]
    return x[:, 0] if vec else x


def inverse_fp(a: np.ndarray, p: int) -> np.ndarray:
    fm = _to_flint(np.asarray(a), p)
    return _from_flint(fm.inv())


def in_span_fp(s: np.ndarray, v: np.ndarray, p: int) -> bool:
    return solve_fp(s, v, p) is not None


@dataclass
class Coordinatizer:
    """Coordinates of vectors with respect to independent columns ``basis``.

    A set of rows where the basis is invertible is fixed once, so each
    query is a single small matrix product.
    """

    basis: np.ndarray
    p: int
    _rows: list[int] = field(init=False, repr=False)
    _inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        b = np.asarray(self.basis) % self.p
        self.basis = b
        k = b.shape[1]
        if k == 0:
            self._rows, self._inv = [], np.zeros((0, 0), dtype=np.int64)
            return
        _, piv = rref_fp(b.T, self.p)
        if len(piv) != k:
            raise ValueError("basis columns are dependent")
        self._rows = piv
        self._inv = inverse_fp(b[piv, :], self.p)

    def coords(self, v: np.ndarray, check: bool = True) -> np.ndarray:
        v = np.asarray(v) % self.p
        k = self.basis.shape[1]
        if k == 0:
            out = np.zeros((0,) + v.shape[1:], dtype=np.int64)
        else:
            out = (self._inv @ v[self._rows]) % self.p
        if check and not np.array_equal((self.basis @ out) % self.p, v):
            raise ValueError("vector not in span")
        return out


# ---------------------------------------------------------------------------
# Z/p^e


def valuation(x: int, p: int, e: int) -> int:
    """p-adic valuation of a residue mod p^e; e for zero."""
    x %= p**e
    if x == 0:
        return e
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def inv_mod(x: int, mod: int) -> int:
    return pow(int(x), -1, mod)


@dataclass(frozen=True)
class SmithForm:
    """``left @ m @ right == diag`` over Z/p^e; ``exponents`` are the diagonal valuations."""

    diag: np.ndarray
    left: np.ndarray
    right: np.ndarray
    exponents: tuple[int, ...]
    p: int
    e: int


def snf_zpe(m, p: int, e: int) -> SmithForm:
    """Smith normal form over the local ring Z/p^e.

    Diagonal entries are exactly p^a with a nondecreasing; zero entries
    (a = e) come last.  L and R are invertible over Z/p^e.
    """
    mod = p**e
    a = as_mod(m, mod).copy()
    rows, cols = a.shape
    left = np.eye(rows, dtype=np.int64)
    right = np.eye(cols, dtype=np.int64)
    exps: list[int] = []
    t = 0
    while t < min(rows, cols):
        sub = a[t:, t:]
        if not sub.any():
            break
        # entry of least valuation
        best, bi, bj = e + 1, -1, -1
        for v in range(e):
            mask = (sub % p ** (v + 1)) != 0
            if mask.any():
                idx = np.argwhere(mask)[0]
                best, bi, bj = v, int(idx[0]) + t, int(idx[1]) + t
                break
        a[[t, bi]] = a[[bi, t]]
        left[[t, bi]] = left[[bi, t]]
        a[:, [t, bj]] = a[:, [bj, t]]
        right[:, [t, bj]] = right[:, [bj, t]]
        piv = int(a[t, t])
        unit = piv // p**best
        u = inv_mod(unit, mod)
        a[t] = (a[t] * u) % mod
        left[t] = (left[t] * u) % mod
        pb = p**best
        for i in range(rows):
            if i != t and a[i, t]:
                f = (int(a[i, t]) // pb) % mod
                a[i] = (a[i] - f * a[t]) % mod
                left[i] = (left[i] - f * left[t]) % mod
        for j in range(cols):
            if j != t and a[t, j]:
                f = (int(a[t, j]) // pb) % mod
                a[:, j] = (a[:, j] - f * a[:, t]) % mod
                right[:, j] = (right[:, j] - f * right[:, t]) % mod
        exps.append(best)
        t += 1
    exps.extend([e] * (min(rows, cols) - len(exps)))
    return SmithForm(a, left, right, tuple(exps), p, e)


def inverse_zpe(m, p: int, e: int) -> np.ndarray:
    """Inverse of a square matrix over Z/p^e (invertible iff invertible mod p)."""
    mod = p**e
    a = as_mod(m, mod).copy()
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("square matrix required")
    inv = np.eye(n, dtype=np.int64)
    for c in range(n):
        r = next((i for i in range(c, n) if a[i, c] % p), None)
        if r is None:
            raise ZeroDivisionError("matrix not invertible mod p")
        a[[c, r]] = a[[r, c]]
        inv[[c, r]] = inv[[r, c]]
        u = inv_mod(int(a[c, c]), mod)
        a[c] = (a[c] * u) % mod
        inv[c] = (inv[c] * u) % mod
        for i in range(n):
            if i != c and a[i, c]:
                f = int(a[i, c])
                a[i] = (a[i] - f * a[c]) % mod
                inv[i] = (inv[i] - f * inv[c]) % mod
    return inv


def kernel_generators_zpe(m, p: int, e: int) -> tuple[np.ndarray, list[int]]:
    """Generators (columns) of ker m over Z/p^e and their additive orders as exponents."""
    mod = p**e
    m = as_mod(m, mod)
    cols = m.shape[1]
    snf = snf_zpe(m, p, e)
    gens, orders = [], []
    for j in range(cols):
        a = snf.exponents[j] if j < len(snf.exponents) else e
        if a == 0:
            continue
        vec = np.zeros(cols, dtype=np.int64)
        vec[j] = p ** (e - a)
        gens.append((snf.right @ vec) % mod)
        orders.append(a)
    if not gens:
        return np.zeros((cols, 0), dtype=np.int64), []
    return np.stack(gens, axis=1), orders


def cokernel_exponents_zpe(m, p: int, e: int) -> list[int]:
    """Invariant-factor exponents of (Z/p^e)^rows / image(m), trivial factors dropped."""
    rows = np.asarray(m).shape[0]
    snf = snf_zpe(m, p, e)
    exps = list(snf.exponents[:rows]) + [e] * max(0, rows - len(snf.exponents))
    return sorted(a for a in exps if a > 0)


def homology_exponents_zpe(f, g, p: int, e: int) -> list[int]:
    """Invariant factors of ker f / im g over Z/p^e (f after g, f @ g == 0).

    ker f is written in the SNF coordinates of f as a sum of cyclic groups;
    the image of g is expressed in those generators and the quotient is
    presented by one more SNF.
    """
    mod = p**e
    f = as_mod(f, mod)
    g = as_mod(g, mod)
    r = f.shape[1]
    snf = snf_zpe(f, p, e)
    rinv = inverse_zpe(snf.right, p, e)
    y = (rinv @ g) % mod  # image of g in SNF coordinates of the source of f
    orders = []
    rows = []
    for j in range(r):
        a = snf.exponents[j] if j < len(snf.exponents) else e
        if a == 0:
            continue
        shift = p ** (e - a)
        if np.any(y[j] % shift):
            raise ArithmeticError("image not contained in kernel")
        orders.append(a)
        rows.append((y[j] // shift) % p**a)
    if not orders:
        return []
    t = np.array(rows, dtype=np.int64).reshape(len(orders), g.shape[1])
    pres = np.concatenate([np.diag([p**a for a in orders]) % mod, t], axis=1)
    return cokernel_exponents_zpe(pres, p, e)

"""Level-truncated simplicial modules and rings, Dold-Kan, homotopy rings.

Monotone maps [m] -> [n] are tuples of length m+1.  The Dold-Kan module of a
complex C has DK(C)_n = sum over surjections [n] -> [k] of C_k, components in
lexicographic order of the surjection tuples.  For a monomorphism d: [s] -> [k]
the map C(d): C_k -> C_s is the identity when d = id, (-1)^k times the
differential when d skips the last vertex, and zero otherwise; with this choice
N(DK(C)) = C on the nose, N using the differential (-1)^n d_n.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .algebra import FiniteLocalRing, check_budget
from .complexes import ChainComplex, CochainComplex, Homology, HomologyBasis, homology
from .errors import ComplexError, SimplicialIdentityError
from .linalg import Coordinatizer, kernel_generators_zpe, nullspace_fp, snf_zpe

Mono = tuple[int, ...]


@lru_cache(maxsize=None)
def surjections(n: int, k: int | None = None) -> tuple[tuple[int, ...], ...]:
    """Monotone surjections [n] -> [k] (all k if None), lexicographic.

    A surjection is fixed by its descent set: the positions i where
    sigma(i+1) = sigma(i) + 1.
    """
    out = []
    for steps in itertools.product((0, 1), repeat=n):
        if k is not None and sum(steps) != k:
            continue
        out.append(tuple(itertools.accumulate((0,) + steps)))
    return tuple(sorted(out))


def face_map(n: int, i: int) -> tuple[int, ...]:
    """delta_i: [n-1] -> [n] skipping i."""
    return tuple(x for x in range(n + 1) if x != i)


def degeneracy_map(n: int, i: int) -> tuple[int, ...]:
    """sigma_i: [n+1] -> [n] hitting i twice."""
    return tuple(x if x <= i else x - 1 for x in range(n + 2))


def epi_mono(f: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """f = d o t with t surjective and d injective."""
    image = sorted(set(f))
    pos = {v: i for i, v in enumerate(image)}
    return tuple(pos[v] for v in f), tuple(image)


class SimplicialModule:
    """Free modules M_0..M_L over Z/p^e with faces and degeneracies.

    ``faces[(n, i)]`` is d_i: M_n -> M_{n-1} and ``degens[(n, i)]`` is
    s_i: M_n -> M_{n+1}, both as matrices acting on column vectors.
    """

    def __init__(self, p: int, e: int, ranks: Sequence[int], faces: dict, degens: dict, check: bool = True):
        self.p, self.e = int(p), int(e)
        self.mod = self.p**self.e
        self.ranks = [int(r) for r in ranks]
        self.level = len(self.ranks) - 1
        L = self.level
        self.faces = {}
        self.degens = {}
        for n in range(1, L + 1):
            for i in range(n + 1):
                self.faces[(n, i)] = self._mat(faces[(n, i)], self.ranks[n - 1], self.ranks[n])
        for n in range(0, L):
            for i in range(n + 1):
                self.degens[(n, i)] = self._mat(degens[(n, i)], self.ranks[n + 1], self.ranks[n])
        if check:
            self.validate()

    def _mat(self, m, r, c) -> np.ndarray:
        a = np.asarray(m, dtype=np.int64).reshape(r, c) % self.mod
        a.setflags(write=False)
        return a

    def d(self, n: int, i: int) -> np.ndarray:
        return self.faces[(n, i)]

    def s(self, n: int, i: int) -> np.ndarray:
        return self.degens[(n, i)]

    def validate(self) -> None:
        """All simplicial identities that fit inside the truncation."""
        mod, L = self.mod, self.level
        eq = lambda a, b: np.array_equal(a % mod, b % mod)  # noqa: E731

        def fail(msg):
            raise SimplicialIdentityError(msg)

        for n in range(2, L + 1):
            for j in range(n + 1):
                for i in range(j):
                    if not eq(self.d(n - 1, i) @ self.d(n, j), self.d(n - 1, j - 1) @ self.d(n, i)):
                        fail(f"d_{i} d_{j} != d_{j-1} d_{i} on level {n}")
        for n in range(0, L - 1):
            for j in range(n + 1):
                for i in range(j + 1):
                    if not eq(self.s(n + 1, i) @ self.s(n, j), self.s(n + 1, j + 1) @ self.s(n, i)):
                        fail(f"s_{i} s_{j} != s_{j+1} s_{i} on level {n}")
        for n in range(0, L):
            ident = np.eye(self.ranks[n], dtype=np.int64)
            for j in range(n + 1):
                for i in range(n + 2):
                    lhs = self.d(n + 1, i) @ self.s(n, j)
                    if i < j:
                        rhs = self.s(n - 1, j - 1) @ self.d(n, i)
                    elif i in (j, j + 1):
                        rhs = ident
                    else:
                        rhs = self.s(n - 1, j) @ self.d(n, i - 1)
                    if not eq(lhs, rhs):
                        fail(f"d_{i} s_{j} identity fails on level {n}")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SimplicialModule)
            and (self.p, self.e, self.ranks) == (other.p, other.e, other.ranks)
            and all(np.array_equal(v, other.faces[k]) for k, v in self.faces.items())
            and all(np.array_equal(v, other.degens[k]) for k, v in self.degens.items())
        )

    def __repr__(self) -> str:
        return f"SimplicialModule(Z/{self.mod}, ranks {self.ranks})"

    @classmethod
    def constant(cls, p: int, e: int, rank: int, level: int) -> "SimplicialModule":
        ident = np.eye(rank, dtype=np.int64)
        faces = {(n, i): ident for n in range(1, level + 1) for i in range(n + 1)}
        degens = {(n, i): ident for n in range(level) for i in range(n + 1)}
        return cls(p, e, [rank] * (level + 1), faces, degens)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "e": self.e,
            "ranks": self.ranks,
            "faces": {f"{n},{i}": m.tolist() for (n, i), m in self.faces.items()},
            "degeneracies": {f"{n},{i}": m.tolist() for (n, i), m in self.degens.items()},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SimplicialModule":
        key = lambda s: tuple(int(x) for x in s.split(","))  # noqa: E731
        return cls(obj["p"], obj["e"], obj["ranks"], {key(k): v for k, v in obj["faces"].items()}, {key(k): v for k, v in obj["degeneracies"].items()})

    def alternating_complex(self) -> ChainComplex:
        """Unnormalized complex with differential sum (-1)^i d_i (same homology as N)."""
        diffs = {}
        for n in range(1, self.level + 1):
            diffs[n] = sum((-1) ** i * self.d(n, i) for i in range(n + 1))
        return ChainComplex(self.p, self.e, 0, self.ranks, diffs)


# ---------------------------------------------------------------------------
# Normalization


def _kernel_basis(m: np.ndarray, p: int, e: int, ambient: int) -> np.ndarray:
    if m.shape[0] == 0:
        return np.eye(ambient, dtype=np.int64)
    if e == 1:
        return nullspace_fp(m, p)
    mod = p**e
    # coordinate subspaces are taken verbatim so that normalization stays canonical
    units = [j for j in range(ambient) if not np.any(m[:, j] % mod)]
    gens, orders = kernel_generators_zpe(m, p, e)
    if sum(orders) == e * len(units):
        return np.eye(ambient, dtype=np.int64)[:, units]
    if any(a != e for a in orders):
        raise ComplexError("normalized chains are not free over Z/p^e")
    return gens


def _coords(basis: np.ndarray, vecs: np.ndarray, p: int, e: int) -> np.ndarray:
    if basis.shape[1] == 0:
        return np.zeros((0, vecs.shape[1]), dtype=np.int64)
    if e == 1:
        return Coordinatizer(basis, p).coords(vecs)
    from .complexes import _coords_free

    return _coords_free(basis, vecs, p, e)


def normalized_with_bases(m: SimplicialModule) -> tuple[ChainComplex, list[np.ndarray]]:
    """N(M) together with the inclusions N_n -> M_n (columns)."""
    bases = []
    for n in range(m.level + 1):
        if n == 0:
            bases.append(np.eye(m.ranks[0], dtype=np.int64))
            continue
        stack = np.concatenate([m.d(n, i) for i in range(n)], axis=0)
        bases.append(_kernel_basis(stack % m.mod, m.p, m.e, m.ranks[n]))
    diffs = {}
    for n in range(1, m.level + 1):
        img = ((-1) ** n * m.d(n, n) @ bases[n]) % m.mod
        diffs[n] = _coords(bases[n - 1], img, m.p, m.e)
    return ChainComplex(m.p, m.e, 0, [b.shape[1] for b in bases], diffs), bases


def normalized(m: SimplicialModule) -> ChainComplex:
    """N(M)_n = intersection of ker d_i for i < n, differential (-1)^n d_n."""
    return normalized_with_bases(m)[0]


# ---------------------------------------------------------------------------
# Dold-Kan


def _dk_component_offsets(c: ChainComplex, n: int):
    offs, pos = {}, 0
    for sig in surjections(n):
        k = sig[-1]
        offs[sig] = (pos, c.rank(k))
        pos += c.rank(k)
    return offs, pos


def _mono_map(c: ChainComplex, d: tuple[int, ...], k: int) -> np.ndarray | None:
    """C(d): C_k -> C_s for the injection d: [s] -> [k]."""
    s = len(d) - 1
    if s == k:
        return np.eye(c.rank(k), dtype=np.int64)
    if s == k - 1 and d == tuple(range(k)):
        return ((-1) ** k * c.d(k)) % c.mod
    return None


def dk_structure_map(c: ChainComplex, theta: Sequence[int], n: int) -> np.ndarray:
    """DK(C)(theta): DK_n -> DK_m for monotone theta: [m] -> [n]."""
    m = len(theta) - 1
    src, ns = _dk_component_offsets(c, n)
    tgt, nt = _dk_component_offsets(c, m)
    out = np.zeros((nt, ns), dtype=np.int64)
    for sig, (so, sr) in src.items():
        if sr == 0:
            continue
        comp = tuple(sig[x] for x in theta)
        t, d = epi_mono(comp)
        block = _mono_map(c, d, sig[-1])
        if block is None:
            continue
        to, tr = tgt[t]
        if tr:
            out[to : to + tr, so : so + sr] += block
    return out % c.mod


def dk(c: ChainComplex, level: int | None = None) -> SimplicialModule:
    """Dold-Kan simplicial module of a complex in degrees >= 0, levels 0..level."""
    if c.lo < 0:
        raise ComplexError("Dold-Kan needs a complex concentrated in degrees >= 0")
    L = c.hi if level is None else level
    L = max(L, 0)
    ranks = [_dk_component_offsets(c, n)[1] for n in range(L + 1)]
    faces = {(n, i): dk_structure_map(c, face_map(n, i), n) for n in range(1, L + 1) for i in range(n + 1)}
    degens = {(n, i): dk_structure_map(c, degeneracy_map(n, i), n) for n in range(L) for i in range(n + 1)}
    return SimplicialModule(c.p, c.e, ranks, faces, degens)


@dataclass(frozen=True)
class HomotopyGroup:
    degree: int
    group: Homology
    reliable: bool


def homotopy_groups(m: SimplicialModule) -> list[HomotopyGroup]:
    """pi_i = H_i(N(M)) for 0 <= i <= L; the top level is flagged unreliable.

    Over Z/p^e the alternating-face complex is used, which has the same
    homology and needs no kernel computation.
    """
    c = normalized(m) if m.e == 1 else m.alternating_complex()
    return [HomotopyGroup(i, homology(c, i), i < m.level) for i in range(m.level + 1)]


# ---------------------------------------------------------------------------
# Simplicial rings


class TModule:
    """A module over a FiniteLocalRing T, free over Z/p^e of rank ``rank``.

    ``action[a]`` is the matrix of multiplication by the a-th basis element of T.
    """

    def __init__(self, ring: FiniteLocalRing, action):
        self.ring = ring
        self.action = np.asarray(action, dtype=np.int64) % ring.mod
        self.rank = self.action.shape[1]
        mod = ring.mod
        if not np.array_equal(np.einsum("a,aij->ij", ring.one, self.action) % mod, np.eye(self.rank, dtype=np.int64)):
            raise ValueError("unit of T does not act as the identity")
        lhs = np.einsum("aij,bjk->abik", self.action, self.action) % mod
        rhs = np.einsum("abc,cik->abik", ring.mul, self.action) % mod
        if not np.array_equal(lhs, rhs):
            raise ValueError("action is not a ring homomorphism")

    @classmethod
    def free(cls, ring: FiniteLocalRing, k: int = 1) -> "TModule":
        reg = ring.reg(np.eye(ring.d, dtype=np.int64))  # (d, d, d): reg[a] multiplication by basis a
        act = np.stack([np.kron(np.eye(k, dtype=np.int64), reg[a]) for a in range(ring.d)])
        return cls(ring, act)

    @classmethod
    def residue_field(cls, ring: FiniteLocalRing) -> "TModule":
        res = ring.residue(np.eye(ring.d, dtype=np.int64))
        return cls(ring, res.reshape(ring.d, 1, 1))

    def act(self, t: np.ndarray) -> np.ndarray:
        return np.einsum("a,aij->ij", np.asarray(t), self.action) % self.ring.mod


class SimplicialRing:
    """Levelwise finite local rings with faces and degeneracies as ring maps."""

    def __init__(self, levels: Sequence[FiniteLocalRing], faces: dict, degens: dict, check: bool = True):
        self.levels = list(levels)
        p, e = self.levels[0].p, self.levels[0].e
        self.module = SimplicialModule(p, e, [r.d for r in self.levels], faces, degens, check=check)
        self.level = self.module.level
        self.p, self.e, self.mod = p, e, p**e
        if check:
            for (n, i), f in self.module.faces.items():
                self._check_ring_map(f, self.levels[n], self.levels[n - 1], f"d_{i} on level {n}")
            for (n, i), f in self.module.degens.items():
                self._check_ring_map(f, self.levels[n], self.levels[n + 1], f"s_{i} on level {n}")

    def _check_ring_map(self, f, src: FiniteLocalRing, tgt: FiniteLocalRing, label) -> None:
        mod = self.mod
        if not np.array_equal((f @ src.one) % mod, tgt.one):
            raise SimplicialIdentityError(f"structure map {label} is not unital")
        # f(e_a e_b) = f(e_a) f(e_b)
        lhs = np.einsum("abc,xc->abx", src.mul, f) % mod
        fa = f.T  # rows: images of basis vectors
        rhs = tgt.times(fa[:, None, :], fa[None, :, :])
        if not np.array_equal(lhs, rhs):
            raise SimplicialIdentityError(f"structure map {label} is not multiplicative")

    def __repr__(self) -> str:
        return f"SimplicialRing(levels {self.module.ranks})"

    @classmethod
    def constant(cls, ring: FiniteLocalRing, level: int) -> "SimplicialRing":
        m = SimplicialModule.constant(ring.p, ring.e, ring.d, level)
        return cls([ring] * (level + 1), m.faces, m.degens)


def square_zero_extension(t: FiniteLocalRing, m: TModule, j: int, level: int | None = None) -> SimplicialRing:
    """T (+) DK(M[j]) levelwise, with (t, x)(t', x') = (tt', t x' + t' x)."""
    L = max(j + 1, 2) if level is None else level
    if j >= L:
        raise ValueError("degree j must be below the truncation level")
    p, e, d, r = t.p, t.e, t.d, m.rank
    c = ChainComplex(p, e, j, [r])
    if j > 0:
        c = ChainComplex(p, e, 0, [0] * j + [r])
    mod_dk = dk(c, L)
    levels = []
    for n in range(L + 1):
        copies = mod_dk.ranks[n] // r if r else 0
        size = d + mod_dk.ranks[n]
        mul = np.zeros((size, size, size), dtype=np.int64)
        mul[:d, :d, :d] = t.mul
        for cidx in range(copies):
            off = d + cidx * r
            for a in range(d):
                # e_a * (copy c, x) = copy c of action[a] x
                mul[a, off : off + r, off : off + r] = m.action[a].T
                mul[off : off + r, a, off : off + r] = m.action[a].T
        one = np.concatenate([t.one, np.zeros(mod_dk.ranks[n], dtype=np.int64)])
        levels.append(FiniteLocalRing(p, e, mul, one, name=f"T+M[{j}]_{n}"))

    def extend(mat):
        rows, cols = mat.shape
        out = np.zeros((d + rows, d + cols), dtype=np.int64)
        out[:d, :d] = np.eye(d, dtype=np.int64)
        out[d:, d:] = mat
        return out

    faces = {k: extend(v) for k, v in mod_dk.faces.items()}
    degens = {k: extend(v) for k, v in mod_dk.degens.items()}
    return SimplicialRing(levels, faces, degens)


def shuffles(p: int, q: int):
    """(p, q)-shuffles as (mu, nu, sign) with mu, nu partitioning {0..p+q-1}."""
    for mu in itertools.combinations(range(p + q), p):
        nu = tuple(x for x in range(p + q) if x not in mu)
        perm = list(mu) + list(nu)
        inv = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
        yield mu, nu, (-1) ** inv


@dataclass
class GradedHomotopyRing:
    """pi_* of a simplicial ring with Eilenberg-Zilber shuffle products.

    Product of a in N_p and b in N_q:
    sum over (p, q)-shuffles (mu, nu) of sign * s_nu(a) * s_mu(b), where
    s_nu = s_{nu_q} ... s_{nu_1} (applied innermost first) and likewise s_mu.
    """

    ring: SimplicialRing
    complex: ChainComplex
    inclusions: list[np.ndarray]
    bases: list[HomologyBasis]
    pi0: FiniteLocalRing | None = None
    reliable_top: int = field(init=False)

    def __post_init__(self):
        self.reliable_top = self.ring.level - 1

    @property
    def groups(self) -> list[Homology]:
        return [homology(self.complex, i) for i in range(self.ring.level + 1)]

    def dim(self, i: int) -> int:
        return self.bases[i].dim

    def representative(self, i: int, x: np.ndarray) -> np.ndarray:
        """Element of A_i representing the class with coordinates x."""
        b = self.bases[i]
        return (self.inclusions[i] @ (b.reps @ np.asarray(x))) % self.ring.mod

    def _degenerate(self, x: np.ndarray, level: int, idx: Sequence[int]) -> np.ndarray:
        for k, i in enumerate(idx):
            x = (self.ring.module.s(level + k, i) @ x) % self.ring.mod
        return x

    def chain_product(self, i: int, a: np.ndarray, j: int, b: np.ndarray) -> np.ndarray:
        """Shuffle product of a in A_i and b in A_j, an element of A_{i+j}."""
        n = i + j
        if n > self.ring.level:
            raise ValueError("product degree exceeds truncation")
        ring = self.ring.levels[n]
        total = np.zeros(ring.d, dtype=np.int64)
        for mu, nu, sign in shuffles(i, j):
            x = self._degenerate(a, i, nu)
            y = self._degenerate(b, j, mu)
            total = total + sign * ring.times(x, y)
        return total % ring.mod

    def product(self, i: int, x: np.ndarray, j: int, y: np.ndarray) -> np.ndarray:
        """Class coordinates of [x] * [y] in pi_{i+j}."""
        n = i + j
        prod = self.chain_product(i, self.representative(i, x), j, self.representative(j, y))
        # back to N_n coordinates, then to homology coordinates
        ncoords = _coords(self.inclusions[n], prod[:, None], self.ring.p, self.ring.e)[:, 0]
        return self.bases[n].coords(ncoords)

    def product_table(self, i: int, j: int) -> np.ndarray:
        """T[c, a, b]: coefficient of basis c of pi_{i+j} in (basis a of pi_i)(basis b of pi_j)."""
        n = i + j
        out = np.zeros((self.dim(n), self.dim(i), self.dim(j)), dtype=np.int64)
        ei, ej = np.eye(self.dim(i), dtype=np.int64), np.eye(self.dim(j), dtype=np.int64)
        for a in range(self.dim(i)):
            for b in range(self.dim(j)):
                out[:, a, b] = self.product(i, ei[a], j, ej[b])
        return out

    def act_scalar(self, t: np.ndarray, j: int, x: np.ndarray) -> np.ndarray:
        """pi_0-action: degenerate t in A_0 up to level j and multiply."""
        tt = self._degenerate(np.asarray(t), 0, [0] * j)
        rep = self.representative(j, x)
        prod = self.ring.levels[j].times(tt, rep)
        ncoords = _coords(self.inclusions[j], prod[:, None], self.ring.p, self.ring.e)[:, 0]
        return self.bases[j].coords(ncoords)


def homotopy_ring(a: SimplicialRing) -> GradedHomotopyRing:
    """Homotopy groups with shuffle products (coefficients must be a field)."""
    if a.level < 2:
        raise ValueError("truncation level must be at least 2")
    if a.e != 1:
        raise NotImplementedError("homotopy rings are computed over prime fields")
    comp, incl = normalized_with_bases(a.module)
    bases = [HomologyBasis(comp, i) for i in range(a.level + 1)]
    pi = GradedHomotopyRing(a, comp, incl, bases)
    pi.pi0 = _pi0_ring(pi)
    return pi


def _pi0_ring(pi: GradedHomotopyRing) -> FiniteLocalRing | None:
    r = pi.dim(0)
    if r == 0:
        return None
    mul = pi.product_table(0, 0).transpose(1, 2, 0)
    one = pi.bases[0].coords(pi.ring.levels[0].one % pi.ring.p)
    return FiniteLocalRing(pi.ring.p, 1, mul, one, name="pi_0")


# ---------------------------------------------------------------------------
# Cosimplicial totalization of a group action


def totalization_raw(group, m, n: int) -> np.ndarray:
    """sum_k (-1)^k delta^k : Z^n -> Z^{n+1} on chains of arrows (b_1..b_n).

    delta^0 drops b_1, delta^k (0 < k <= n) composes b_{k+1} b_k, and
    delta^{n+1} drops b_{n+1} then acts by it.
    """
    N, r = group.order, m.rank
    tup = group.tuples(n + 1)  # (b_1..b_{n+1})
    rows = np.arange(len(tup))
    out = np.zeros((len(tup) * r, N**n * r), dtype=np.int64)
    a = np.arange(r)

    def add(cols, sign):
        np.add.at(out, ((rows[:, None] * r + a).ravel(), (cols[:, None] * r + a).ravel()), sign)

    add(group.tuple_index(tup[:, 1:]), 1)
    for k in range(1, n + 1):
        comp = group.table[tup[:, k], tup[:, k - 1]]
        new = np.concatenate([tup[:, : k - 1], comp[:, None], tup[:, k + 1 :]], axis=1)
        add(group.tuple_index(new), (-1) ** k)
    cols = group.tuple_index(tup[:, :n])
    blocks = m.action[tup[:, n]] * (-1) ** (n + 1)
    rr = np.broadcast_to(rows[:, None, None] * r + a[None, :, None], blocks.shape)
    cc = np.broadcast_to(cols[:, None, None] * r + a[None, None, :], blocks.shape)
    np.add.at(out, (rr.ravel(), cc.ravel()), blocks.ravel())
    return out % m.mod


def _relabel(group, m, n: int) -> tuple[np.ndarray, int]:
    """Isomorphism Z^n -> C^n, phi -> s_n * phi(reversed tuple), s_n = (-1)^{n(n+1)/2}.

    Returned as (src, s_n): coordinate i of the image is s_n times coordinate
    src[i] of the input.
    """
    r = m.rank
    tup = group.tuples(n)
    src = group.tuple_index(tup[:, ::-1])
    a = np.arange(r)
    return (src[:, None] * r + a).ravel(), (-1) ** (n * (n + 1) // 2)


def cosimplicial_group_complex(group, m, top: int, raw: bool = False, budget: int | None = None) -> CochainComplex:
    """Totalization of the cosimplicial module prod_{G^n} M.

    With ``raw`` the complex is returned on chains of arrows (b_1..b_n);
    otherwise it is transported along the relabelling isomorphism to the
    inhomogeneous cochain basis, where it agrees with the group cochain
    differential matrix for matrix.
    """
    check_budget(group.order**top * m.rank, budget, "totalization")
    ranks = [group.order**n * m.rank for n in range(top + 1)]
    diffs = {}
    for n in range(top):
        t = totalization_raw(group, m, n)
        if not raw:
            # reversal is an involution, so the inverse relabelling uses the same indices
            src_next, s_next = _relabel(group, m, n + 1)
            src, s_n = _relabel(group, m, n)
            t = s_next * s_n * t[src_next][:, src]
        diffs[n] = t % m.mod
    return CochainComplex(m.p, m.e, 0, ranks, diffs)

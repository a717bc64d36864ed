"""Nearly ordinary cohomology as a mapping cone, and the exact sequence it sits in.

Over a prime field k.  For each place v a LocalDatum carries the subgroup
G_v, an optional inertia subgroup I_v <= G_v, and a G_v-submodule
``iota: b_v -> g`` (for the Borel condition b_v = gbar^{-1} b gbar).

Local target complex:  loc^0 = 0,  loc^1 = sum_v C^1(G_v, g) / Lt_v,
loc^n = sum_v C^n(G_v, g) for n >= 2, where Lt_v = iota Z^1(G_v, b_v) + B^1(G_v, g).
The ordinary complex is X^n = loc^{n-1} (+) C^n(G, g) with
d(psi, phi) = (d psi + res phi, -d phi).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .complexes import ChainMap, CochainComplex, HomologyBasis, cohomology, cohomology_basis, cone, exactness_defects
from .errors import MissingInertia, NotBorelValued
from .galois import (
    Character,
    FiniteGroup,
    GModule,
    Representation,
    adjoint_module,
    cochain_complex,
    cochain_differential,
    flavor_positions,
    position_matrix,
)
from .linalg import colspace_fp, inverse_fp, left_annihilator_fp, matmul_mod, nullspace_fp, rank_fp, solve_fp

TOP = 3  # highest cohomological degree of the ordinary complex that is reported


@dataclass
class LocalDatum:
    """Local data at a place v.

    ``sub`` is a module over the subgroup with equivariant injection ``iota``
    into g restricted to the subgroup.  ``quotient``/``pi`` give the torus
    quotient b/n used by the strict condition.
    """

    label: str
    elements: list[int]
    sub: GModule
    iota: np.ndarray
    inertia: list[int] | None = None
    quotient: GModule | None = None
    pi: np.ndarray | None = None
    gbar: np.ndarray | None = None

    def subgroup(self, group: FiniteGroup) -> tuple[FiniteGroup, np.ndarray]:
        return group.subgroup(self.elements)


def _conj_matrix(gbar: np.ndarray, n: int, sub_flavor: str, amb_flavor: str, p: int) -> np.ndarray:
    """Coordinates of Y -> gbar^{-1} Y gbar from sub-flavor to ambient-flavor positions."""
    gi = inverse_fp(gbar, p)
    sub_pos = flavor_positions(n, sub_flavor)
    amb_pos = flavor_positions(n, amb_flavor)
    cols = []
    for (i, j) in sub_pos:
        y = np.zeros((n, n), dtype=np.int64)
        y[i, j] = 1
        x = (gi @ y @ gbar) % p
        outside = [(a, b) for a in range(n) for b in range(n) if (a, b) not in amb_pos and x[a, b]]
        if outside:
            raise NotBorelValued("conjugated Borel does not lie in the ambient module")
        cols.append([x[a, b] for (a, b) in amb_pos])
    return np.array(cols, dtype=np.int64).T.reshape(len(amb_pos), len(sub_pos))


def borel_datum(
    rho: Representation,
    label: str,
    elements: Sequence[int],
    gbar=None,
    inertia: Sequence[int] | None = None,
    ambient: str = "gl",
    sub_flavor: str = "borel",
) -> LocalDatum:
    """Local datum for the condition 'rho|G_v lies in gbar^{-1} B gbar'."""
    ring = rho.ring
    if ring.d != 1 or ring.e != 1:
        raise ValueError("ordinary cohomology is implemented over prime fields")
    p, n = ring.p, rho.n
    gbar = np.eye(n, dtype=np.int64) if gbar is None else np.asarray(gbar, dtype=np.int64) % p
    group = rho.group
    sub, emb = group.subgroup(elements)
    local = Representation(sub, ring, rho.mats[emb], check=False)
    conj = local.conjugate(ring.lift_residue_matrix(inverse_fp(gbar, p)))  # gbar rho gbar^{-1}
    if not conj.is_upper_triangular():
        raise NotBorelValued(f"rho restricted to {label} is not in gbar^-1 B gbar")
    b = adjoint_module(conj, sub_flavor)
    iota = _conj_matrix(gbar, n, sub_flavor, ambient, p)
    quotient = pi = None
    if sub_flavor == "borel":
        quotient = adjoint_module(conj, "torus")
        pi = position_matrix(n, 1, "borel", "torus")
    elif sub_flavor == "torus":
        quotient, pi = b, np.eye(b.rank, dtype=np.int64)
    return LocalDatum(label, sorted(int(x) for x in elements), b, iota, None if inertia is None else sorted(int(x) for x in inertia), quotient, pi, gbar)


def find_gbar(rho: Representation, elements: Sequence[int]) -> np.ndarray | None:
    """First gbar in GL_n(F_p) (lexicographic entries) with gbar rho gbar^{-1} upper triangular on ``elements``."""
    p, n = rho.ring.p, rho.n
    mats = rho.ring.residue(rho.mats[list(elements)])
    low = np.tril_indices(n, -1)
    for flat in itertools.product(range(p), repeat=n * n):
        gb = np.array(flat, dtype=np.int64).reshape(n, n)
        if rank_fp(gb, p) < n:
            continue
        conj = np.einsum("ij,gjk,kl->gil", gb, mats, inverse_fp(gb, p)) % p
        if not np.any(conj[:, low[0], low[1]]):
            return gb
    return None


def _check_iota(datum: LocalDatum, g_local: GModule) -> None:
    lhs = np.einsum("gij,jk->gik", g_local.action, datum.iota) % g_local.mod
    rhs = np.einsum("ij,gjk->gik", datum.iota, datum.sub.action) % g_local.mod
    if not np.array_equal(lhs, rhs):
        raise NotBorelValued(f"embedding at {datum.label} is not equivariant")
    if rank_fp(datum.iota, g_local.p) != datum.sub.rank:
        raise NotBorelValued(f"embedding at {datum.label} is not injective")


def _cochain_map(iota: np.ndarray, count: int) -> np.ndarray:
    return np.kron(np.eye(count, dtype=np.int64), iota)


@dataclass
class LocalCondition:
    label: str
    L_tilde: np.ndarray  # basis of Lt_v inside C^1(G_v, g), columns
    L: np.ndarray  # basis of L_v in H^1(G_v, g) coordinates, columns
    h1_basis: HomologyBasis
    dim_B1: int

    @property
    def dim_L(self) -> int:
        return self.L.shape[1]

    @property
    def dim_L_tilde(self) -> int:
        return self.L_tilde.shape[1]


def _local_setup(group: FiniteGroup, g: GModule, datum: LocalDatum):
    sub, emb = datum.subgroup(group)
    g_loc = g.restrict(emb, sub)
    _check_iota(datum, g_loc)
    return sub, emb, g_loc


def _condition_from_cocycles(label, sub, g_loc, zsub: np.ndarray, iota) -> LocalCondition:
    p = g_loc.p
    img = (_cochain_map(iota, sub.order) @ zsub) % p
    b1 = colspace_fp(cochain_differential(sub, g_loc, 0), p)
    lt = colspace_fp(np.concatenate([img, b1], axis=1), p)
    h1 = cohomology_basis(cochain_complex(sub, g_loc, 2), 1)
    lcoords = h1.coords(lt) if lt.shape[1] else np.zeros((h1.dim, 0), dtype=np.int64)
    L = colspace_fp(lcoords, p) if lcoords.size else np.zeros((h1.dim, 0), dtype=np.int64)
    return LocalCondition(label, lt, L, h1, b1.shape[1])


def local_condition(group: FiniteGroup, g: GModule, datum: LocalDatum) -> LocalCondition:
    """L_v = im(H^1(G_v, b) -> H^1(G_v, g)) and its preimage Lt_v in Z^1(G_v, g)."""
    sub, emb, g_loc = _local_setup(group, g, datum)
    zsub = nullspace_fp(cochain_differential(sub, datum.sub, 1), g.p)
    return _condition_from_cocycles(datum.label, sub, g_loc, zsub, datum.iota)


def strict_local_condition(group: FiniteGroup, g: GModule, datum: LocalDatum) -> LocalCondition:
    """L'_v: classes from H^1(G_v, b) dying in H^1(I_v, b/n)."""
    if datum.inertia is None:
        raise MissingInertia(f"place {datum.label} has no inertia subgroup")
    if datum.quotient is None or datum.pi is None:
        raise MissingInertia(f"place {datum.label} has no torus quotient")
    sub, emb, g_loc = _local_setup(group, g, datum)
    p = g.p
    zsub = nullspace_fp(cochain_differential(sub, datum.sub, 1), p)
    # inertia as a subgroup of G_v
    pos = {int(x): i for i, x in enumerate(emb)}
    if not set(datum.inertia) <= set(pos):
        raise MissingInertia(f"inertia at {datum.label} is not inside the decomposition group")
    inert_idx = [pos[x] for x in datum.inertia]
    isub, iemb = sub.subgroup(inert_idx)
    t_loc = datum.quotient.restrict(iemb, isub)
    # pi o res_I : C^1(G_v, b) -> C^1(I_v, t)
    r = datum.sub.rank
    sel = np.zeros((isub.order * r, sub.order * r), dtype=np.int64)
    for k, x in enumerate(iemb):
        sel[k * r : (k + 1) * r, x * r : (x + 1) * r] = np.eye(r, dtype=np.int64)
    m = (_cochain_map(datum.pi, isub.order) @ sel) % p
    b1 = colspace_fp(cochain_differential(isub, t_loc, 0), p)
    ann = left_annihilator_fp(b1, p)
    if zsub.shape[1]:
        keep = nullspace_fp((ann @ m @ zsub) % p, p)
        zstrict = (zsub @ keep) % p
    else:
        zstrict = zsub
    return _condition_from_cocycles(datum.label, sub, g_loc, zstrict, datum.iota)


# ---------------------------------------------------------------------------
# The ordinary complex


@dataclass
class OrdinaryData:
    """Global and local cochains, the local conditions and the restriction map."""

    group: FiniteGroup
    g: GModule
    conditions: list[LocalCondition]
    glob: CochainComplex  # C^0..C^top(G, g)
    loc: CochainComplex  # loc^0..loc^top
    res: ChainMap  # C(G, g) -> loc^0..loc^{top-1}
    parts: list = field(default_factory=list)

    @property
    def X(self) -> CochainComplex:
        # as a cochain complex cone^n = loc^n + C^{n+1}, so X^n = cone^{n-1}
        return _shift_up(CochainComplex.from_chain(cone(self.res)))


_GLOBAL_CACHE: dict = {}


def _global_data(group: FiniteGroup, g: GModule, top: int):
    """C(G, g) up to ``top`` and its cohomology bases below ``top``, memoized."""
    key = (group.table.tobytes(), g.action.tobytes(), g.p, g.e, top)
    if key not in _GLOBAL_CACHE:
        if len(_GLOBAL_CACHE) > 16:
            _GLOBAL_CACHE.clear()
        glob = cochain_complex(group, g, top)
        _GLOBAL_CACHE[key] = (glob, {n: cohomology_basis(glob, n) for n in range(top)})
    return _GLOBAL_CACHE[key]


def _local_complex(group, g, datums, conditions, top):
    """Build loc and the restriction map C(G, g) -> loc up to degree ``top``."""
    p, r = g.p, g.rank
    glob, _ = _global_data(group, g, top)
    parts = []
    for datum, cond in zip(datums, conditions):
        sub, emb, g_loc = _local_setup(group, g, datum)
        cc = cochain_complex(sub, g_loc, top)
        quot = left_annihilator_fp(cond.L_tilde, p)
        # any section works: its ambiguity lies in Lt_v, which d^1 kills
        section = solve_fp(quot, np.eye(quot.shape[0], dtype=np.int64), p)
        if section is None:
            section = np.zeros((cc.rank(1), 0), dtype=np.int64)
        parts.append((sub, emb, cc, quot, section))
    ranks = [0, sum(q.shape[0] for _, _, _, q, _ in parts)]
    ranks += [sum(cc.rank(n) for _, _, cc, _, _ in parts) for n in range(2, top + 1)]
    diffs = {0: np.zeros((ranks[1], 0), dtype=np.int64)}
    for n in range(1, top):
        blocks = [(cc.d(1) @ sec) % p if n == 1 else cc.d(n) for _, _, cc, _, sec in parts]
        diffs[n] = _block_diag(blocks)
    loc = CochainComplex(p, 1, 0, ranks, diffs)
    # restriction lands in loc cut off above top - 1: the cone then stops at
    # X^top = loc^{top-1} + C^top, which is all H^{top-1}(X) needs
    loc_cut = CochainComplex(p, 1, 0, ranks[:top], {n: diffs[n] for n in range(top - 1)})
    maps = {0: np.zeros((0, glob.rank(0)), dtype=np.int64)}
    for n in range(1, top):
        blocks = []
        for sub, emb, cc, quot, _ in parts:
            cols = group.tuple_index(emb[sub.tuples(n)])
            sel = np.zeros((len(cols) * r, glob.rank(n)), dtype=np.int64)
            rows = np.arange(len(cols) * r)
            sel[rows, (cols[:, None] * r + np.arange(r)).ravel()] = 1
            blocks.append((quot @ sel) % p if n == 1 else sel)
        maps[n] = np.concatenate(blocks, axis=0) if blocks else np.zeros((0, glob.rank(n)), dtype=np.int64)
    res = ChainMap.cochain(glob, loc_cut, maps)
    return glob, loc, res, parts


def _block_diag(blocks):
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols), dtype=np.int64)
    i = j = 0
    for b in blocks:
        out[i : i + b.shape[0], j : j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out


def _shift_up(c: CochainComplex) -> CochainComplex:
    """Same matrices, degrees moved up by one (X^n = cone^{n-1})."""
    return CochainComplex(c.p, c.e, c.lo + 1, c.ranks, {n + 1: c.d(n) for n in range(c.lo, c.hi)})


def build_ordinary(group: FiniteGroup, g: GModule, datums: Sequence[LocalDatum], strict: bool = False, top: int = TOP + 1) -> OrdinaryData:
    if g.e != 1:
        raise ValueError("ordinary cohomology is implemented over prime fields")
    make = strict_local_condition if strict else local_condition
    conditions = [make(group, g, d) for d in datums]
    glob, loc, res, parts = _local_complex(group, g, datums, conditions, top)
    return OrdinaryData(group, g, conditions, glob, loc, res, parts)


def ordinary_complex(group: FiniteGroup, datums: Sequence[LocalDatum], g: GModule) -> CochainComplex:
    """C_ord(G, g): the cone of restriction into the quotiented local complex."""
    return build_ordinary(group, g, datums).X


def ordinary_mu_complex(group: FiniteGroup, datums: Sequence[LocalDatum], g: GModule) -> CochainComplex:
    """Same cone with the strict local condition L'_v (needs inertia at every place)."""
    return build_ordinary(group, g, datums, strict=True).X


# ---------------------------------------------------------------------------
# Exact sequence


@dataclass
class OrdinaryComplexReport:
    h_ord: list[int]
    h_global: list[int]
    h_local: list[int]
    dim_L: dict
    dim_L_tilde: dict
    nodes: list[str]
    dims: list[int]
    verdicts: dict
    alternating_sum: int
    greenberg_wiles: bool
    h0_isomorphism: bool
    h2_local_borel: dict

    @property
    def all_exact(self) -> bool:
        return all(v == "Exact" for v in self.verdicts.values())

    def to_json(self) -> dict:
        return {
            "H_ord": self.h_ord,
            "H": self.h_global,
            "H_loc": self.h_local,
            "dim_L": self.dim_L,
            "dim_L_tilde": self.dim_L_tilde,
            "nodes": self.nodes,
            "dims": self.dims,
            "verdicts": self.verdicts,
            "alternating_sum": self.alternating_sum,
            "greenberg_wiles": self.greenberg_wiles,
            "H0_isomorphism": self.h0_isomorphism,
            "H2_local_borel": self.h2_local_borel,
        }


def _map_on_cohomology(f_mat: np.ndarray, src: HomologyBasis, tgt: HomologyBasis, p: int) -> np.ndarray:
    if src.dim == 0 or tgt.dim == 0:
        return np.zeros((tgt.dim, src.dim), dtype=np.int64)
    return tgt.coords((f_mat @ src.reps) % p)


def _cone_basis(data: OrdinaryData, n: int, zg: np.ndarray) -> HomologyBasis:
    """Basis of H^n of X = cone, using the global cocycles Z^n (columns ``zg``).

    (psi, phi) is a cocycle iff phi = zg a and d psi + res(zg a) = 0, a small
    system in (psi, a) instead of the full kernel of d: X^n -> X^{n+1}.
    """
    p, loc, glob = data.g.p, data.loc, data.glob
    lp, lg = loc.rank(n - 1), glob.rank(n)
    system = np.concatenate([loc.d(n - 1).reshape(loc.rank(n), lp), matmul_mod(data.res.f(-n), zg, p)], axis=1)
    if system.shape[1]:
        k = nullspace_fp(system, p) if system.shape[0] else np.eye(system.shape[1], dtype=np.int64)
    else:
        k = np.zeros((0, 0), dtype=np.int64)
    cycles = np.concatenate([k[:lp], matmul_mod(zg, k[lp:], p)], axis=0) if k.size else np.zeros((lp + lg, 0), dtype=np.int64)
    # boundaries: image of X^{n-1} = loc^{n-2} + C^{n-1}
    lq, lh = loc.rank(n - 2), glob.rank(n - 1)
    top = np.concatenate([loc.d(n - 2).reshape(lp, lq), data.res.f(-(n - 1)).reshape(lp, lh)], axis=1)
    bottom = np.concatenate([np.zeros((lg, lq), dtype=np.int64), (-glob.d(n - 1).reshape(lg, lh)) % p], axis=1)
    bnd = np.concatenate([top, bottom], axis=0)
    return HomologyBasis.from_spaces(p, lp + lg, cycles, bnd)


def verify_star(group: FiniteGroup, datums: Sequence[LocalDatum], g: GModule, strict: bool = False) -> OrdinaryComplexReport:
    """Build every map of the sequence

    0 -> H0_ord -> H0 -> H0_loc -> H1_ord -> H1 -> H1_loc -> H2_ord -> H2 -> H2_loc -> H3_ord -> H3 -> H3_loc

    and check im = ker at every node from H0_ord to H3.  Over a finite group
    H3(G, g) need not vanish, so the sequence is continued past H3_ord.
    """
    p = g.p
    data = build_ordinary(group, g, datums, strict=strict, top=TOP + 1)
    glob, loc = data.glob, data.loc
    _, bG = _global_data(group, g, TOP + 1)
    bX = {n: _cone_basis(data, n, bG[n].cycles.reshape(glob.rank(n), -1)) for n in range(TOP + 1)}
    bL = {n: cohomology_basis(loc, n) for n in range(TOP + 1)}
    maps = [np.zeros((bX[0].dim, 0), dtype=np.int64)]
    dims, nodes = [0], []
    for n in range(TOP + 1):
        # X^n -> C^n: (psi, phi) -> (-1)^n phi is a chain map
        proj = np.concatenate([np.zeros((glob.rank(n), loc.rank(n - 1)), dtype=np.int64), (-1) ** n * np.eye(glob.rank(n), dtype=np.int64)], axis=1) % p
        maps.append(_map_on_cohomology(proj, bX[n], bG[n], p))
        maps.append(_map_on_cohomology(data.res.f(-n), bG[n], bL[n], p))
        if n < TOP:
            # loc^n -> X^{n+1}: psi -> (psi, 0)
            inc = np.concatenate([np.eye(loc.rank(n), dtype=np.int64), np.zeros((glob.rank(n + 1), loc.rank(n)), dtype=np.int64)], axis=0)
            maps.append(_map_on_cohomology(inc, bL[n], bX[n + 1], p))
        dims += [bX[n].dim, bG[n].dim, bL[n].dim]
        nodes += [f"H{n}_ord", f"H{n}", f"H{n}_loc"]
    bad = set(exactness_defects(maps, dims, p))
    # the last node H3_loc would need the next map; it is left unchecked
    verdicts = {name: ("NotExact" if k in bad else "Exact") for k, name in enumerate(nodes[:-1], start=1)}

    def rk(m):
        return rank_fp(m, p) if m.size else 0

    # alternating sum up to H3_ord, closed off by the image of H3_ord in H3
    last = nodes.index(f"H{TOP}_ord") + 1
    alt = sum((-1) ** i * d for i, d in enumerate(dims[1 : last + 1])) + (-1) ** last * rk(maps[last])
    # ker(H1 -> H1_loc) is the image of H1_ord, and H1_ord -> H1 is injective
    k1 = nodes.index("H1_ord") + 1
    gw = rk(maps[k1]) == bX[1].dim and bG[1].dim - rk(maps[k1 + 1]) == bX[1].dim
    h0_iso = bX[0].dim == bG[0].dim == rk(maps[1])
    h2b = {}
    for datum in datums:
        sub, _ = datum.subgroup(group)
        h2b[datum.label] = cohomology(cochain_complex(sub, datum.sub, 3), 2).dim
    return OrdinaryComplexReport(
        h_ord=[bX[n].dim for n in range(TOP + 1)],
        h_global=[bG[n].dim for n in range(TOP + 1)],
        h_local=[bL[n].dim for n in range(TOP + 1)],
        dim_L={c.label: c.dim_L for c in data.conditions},
        dim_L_tilde={c.label: c.dim_L_tilde for c in data.conditions},
        nodes=nodes[:-1],
        dims=dims[1:-1],
        verdicts=verdicts,
        alternating_sum=alt,
        greenberg_wiles=gw,
        h0_isomorphism=h0_iso,
        h2_local_borel=h2b,
    )


def h1_ord_tilde(group: FiniteGroup, datums: Sequence[LocalDatum], g: GModule) -> int:
    """dim ker(H^1(G, g) -> sum_v H^1(G_v, g)/L_v)."""
    data = build_ordinary(group, g, datums, top=2)
    p = g.p
    bG = cohomology_basis(data.glob, 1)
    bL = cohomology_basis(data.loc, 1)
    m = _map_on_cohomology(data.res.f(-1), bG, bL, p)
    return bG.dim - (rank_fp(m, p) if m.size else 0)


# ---------------------------------------------------------------------------
# Regularity


@dataclass
class RegularityReport:
    reg: bool
    reg_star: bool
    reg_witnesses: list[tuple[int, int]]
    reg_star_witnesses: list[tuple[int, int]]

    def to_json(self) -> dict:
        return {
            "Reg": self.reg,
            "RegStar": self.reg_star,
            "Reg_witnesses": [list(w) for w in self.reg_witnesses],
            "RegStar_witnesses": [list(w) for w in self.reg_star_witnesses],
        }


def check_regularity(datum: LocalDatum, rho: Representation, omega: Character) -> RegularityReport:
    """(Reg_v): chi_i/chi_j != 1 and (Reg*_v): chi_i/chi_j != omega on G_v, for i < j."""
    ring = rho.ring
    p, n = ring.p, rho.n
    gbar = np.eye(n, dtype=np.int64) if datum.gbar is None else datum.gbar
    elems = datum.elements
    mats = ring.residue(rho.mats[elems])
    conj = np.einsum("ij,gjk,kl->gil", gbar, mats, inverse_fp(gbar, p)) % p
    low = np.tril_indices(n, -1)
    if np.any(conj[:, low[0], low[1]]):
        raise NotBorelValued(f"rho restricted to {datum.label} is not upper triangular after conjugation")
    diag = np.stack([conj[:, i, i] for i in range(n)], axis=1)  # (|G_v|, n)
    om = np.array([omega.values[x] % p for x in elems], dtype=np.int64)
    reg_w, star_w = [], []
    for i in range(n):
        for j in range(i + 1, n):
            inv_j = np.array([pow(int(x), -1, p) for x in diag[:, j]], dtype=np.int64)
            alpha = (diag[:, i] * inv_j) % p
            if np.all(alpha == 1):
                reg_w.append((i + 1, j + 1))
            if np.all(alpha == om):
                star_w.append((i + 1, j + 1))
    return RegularityReport(not reg_w, not star_w, reg_w, star_w)

"""Scenario-driven command line: validate a scenario file, run its tasks, emit fixtures.

A scenario is a JSON object with these keys:

    name, schema            identification
    rings                   {name: ring spec}; kinds prime_field, dual_numbers, z_mod_pe,
                            truncated_poly, or structure constants {p, e, rank, mul, one}
    group                   {"cyclic": n} | {"permutations": [...]} | {"cayley": table,
                            "generators": [...]} | {"product": [group, group]};
                            optional "relations" (signed 1-based words) and "name"
    representation          {"ring": name, "generators": matrices}  (residual, over a field)
    lift_ring               ring name used by deform / tangent / pseudo-character lifts
    places                  [{label, words | elements, inertia_words | inertia, gbar,
                              ambient, sub_flavor}]
    omega                   {"values": character values on the generators}
    surjection              {source, target, matrix, representation?}
    quasi_lift              {ring, sigma, phi, g}
    pseudochar              {"source": quasi_lift | lift | residual, "lift_index": k}
    bounds                  {M, L, top}
    tasks                   names, or {"task": name, "expect": {...}, ...params}

Matrices over a ring of rank d > 1 are given either as residues (n x n) or as
full coordinates (n x n x d).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .algebra import FiniteLocalRing, dual_numbers, group_array, matmul, prime_field, truncated_poly, z_mod_pe
from .complexes import cohomology
from .deformation import (
    ResidualRep,
    Surjection,
    batch_inverse,
    build_quasi_hom,
    check_presentation,
    deformation_classes,
    enumerate_lifts,
    exhaustive_lift_search,
    is_ordinary,
    obstruction_class,
    ordinary_filter,
    tangent_check,
)
from .errors import BudgetExceeded, DerivlabError, ParseError, UnknownFixture, ValidationErrors
from .fixtures import NAMES as FIXTURE_NAMES
from .fixtures import fixture
from .galois import Character, FiniteGroup, GModule, Representation, adjoint_module, cochain_complex
from .pseudochar import conj_equivalent, from_quasi_lift, reconstruct, reflection_check, verify_axioms
from .selmer import borel_datum, check_regularity, find_gbar, h1_ord_tilde, local_condition, strict_local_condition, verify_star
from .suite import dold_kan_corpus, homotopy_ring_check, square_zero_rings, totalization_check

REPORT_SCHEMA = 1
VERDICTS = ("Pass", "Fail", "Inconclusive")
TASKS = (
    "cohomology",
    "selmer",
    "selmer-mu",
    "star",
    "deform",
    "tangent",
    "obstruction",
    "doldkan-roundtrip",
    "homotopy-ring",
    "totalization",
    "pseudochar-verify",
    "pseudochar-reflect",
    "pseudochar-reconstruct",
)
NEEDS_REP = {"selmer", "selmer-mu", "star", "deform", "tangent", "pseudochar-reconstruct"}
NEEDS_PLACES = {"selmer", "selmer-mu"}
NEEDS_RELATIONS = {"deform", "tangent", "obstruction"}


# ---------------------------------------------------------------------------
# JSON helpers


def plain(obj):
    """Recursively turn numpy scalars/arrays and tuples into JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def canonical(obj) -> str:
    return json.dumps(plain(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    return data


# ---------------------------------------------------------------------------
# validation


@dataclass
class Place:
    label: str
    elements: list[int]
    inertia: list[int] | None
    gbar: np.ndarray | None
    ambient: str
    sub_flavor: str


@dataclass
class Scenario:
    name: str
    raw: dict
    rings: dict[str, FiniteLocalRing]
    group: FiniteGroup | None
    residual: ResidualRep | None = None
    lift_ring: FiniteLocalRing | None = None
    places: list[Place] = field(default_factory=list)
    datums: list = field(default_factory=list)
    omega: Character | None = None
    surjection: Surjection | None = None
    surj_rep: Representation | None = None
    quasi: object | None = None
    pseudochar: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    tasks: list[dict] = field(default_factory=list)

    @property
    def p(self) -> int | None:
        if self.residual is not None:
            return self.residual.p
        return next((r.p for r in self.rings.values()), None)


class _Errors:
    def __init__(self):
        self.items: list[str] = []

    def add(self, where: str, msg) -> None:
        self.items.append(f"{where}: {msg}")

    def guard(self, where: str, fn, *args, **kwargs):
        """Call fn; record any library validation error instead of raising."""
        try:
            return fn(*args, **kwargs)
        except (DerivlabError, ValueError, KeyError, TypeError, IndexError) as exc:
            self.add(where, exc)
            return None


def _int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _build_ring(spec) -> FiniteLocalRing:
    if not isinstance(spec, dict):
        raise ValueError("ring spec must be an object")
    kind = spec.get("kind", "structure")
    if kind == "prime_field":
        return prime_field(int(spec["p"]))
    if kind == "dual_numbers":
        return dual_numbers(int(spec["p"]))
    if kind == "z_mod_pe":
        return z_mod_pe(int(spec["p"]), int(spec["e"]))
    if kind == "truncated_poly":
        return truncated_poly(int(spec["p"]), int(spec["k"]))
    if kind == "structure":
        return FiniteLocalRing.from_spec(spec, name=spec.get("name"))
    raise ValueError(f"unknown ring kind {kind!r}")


def _build_group(spec, errs: _Errors, where: str = "group") -> FiniteGroup | None:
    if not isinstance(spec, dict):
        errs.add(where, "must be an object")
        return None
    rels = spec.get("relations")
    name = spec.get("name")
    if "product" in spec:
        parts = spec["product"]
        if not isinstance(parts, list) or len(parts) != 2:
            errs.add(where, "'product' takes two groups")
            return None
        g = _build_group(parts[0], errs, f"{where}.product[0]")
        h = _build_group(parts[1], errs, f"{where}.product[1]")
        return None if g is None or h is None else errs.guard(where, FiniteGroup.product, g, h)
    if "cyclic" in spec:
        n = spec["cyclic"]
        if not _int(n) or n < 1:
            errs.add(where, "'cyclic' must be a positive integer")
            return None
        g = FiniteGroup.cyclic(n)
        if rels is not None:
            g = errs.guard(where, FiniteGroup, g.table, g.generators, rels, name=name or g.name)
        return g
    if "permutations" in spec:
        perms = spec["permutations"]
        if not isinstance(perms, list) or not perms:
            errs.add(where, "'permutations' must be a non-empty list")
            return None
        deg = len(perms[0])
        for i, pm in enumerate(perms):
            if not isinstance(pm, list) or sorted(pm) != list(range(deg)):
                errs.add(f"{where}.permutations[{i}]", f"not a permutation of 0..{deg - 1}")
                return None
        return errs.guard(where, FiniteGroup.from_permutations, perms, rels or (), name=name)
    if "cayley" in spec:
        table = np.asarray(spec["cayley"])
        gens = spec.get("generators")
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.dtype.kind not in "iu":
            errs.add(where, "'cayley' must be a square integer table")
            return None
        if gens is not None and not all(_int(x) and 0 <= x < len(table) for x in gens):
            errs.add(f"{where}.generators", f"generator references must be element ids in 0..{len(table) - 1}")
            return None
        return errs.guard(where, FiniteGroup, table, gens, rels or (), name=name)
    errs.add(where, "expected one of 'cyclic', 'permutations', 'cayley', 'product'")
    return None


def _matrix(ring: FiniteLocalRing, m) -> np.ndarray:
    a = np.asarray(m)
    if a.dtype.kind not in "iu":
        raise ValueError("matrix entries must be integers")
    if a.ndim == 2 and a.shape[0] == a.shape[1]:
        return ring.lift_residue_matrix(a)
    if a.ndim == 3 and a.shape[0] == a.shape[1] and a.shape[2] == ring.d:
        return a.astype(np.int64) % ring.mod
    raise ValueError(f"expected an n x n matrix or n x n x {ring.d} coordinates, got shape {a.shape}")


def _matrices(ring: FiniteLocalRing, ms, count: int) -> list[np.ndarray]:
    if not isinstance(ms, list) or len(ms) != count:
        raise ValueError(f"expected {count} matrices, one per group generator")
    out = [_matrix(ring, m) for m in ms]
    if len({m.shape for m in out}) != 1:
        raise ValueError("matrices have different sizes")
    return out


def _ring_ref(sc: Scenario, name, errs: _Errors, where: str) -> FiniteLocalRing | None:
    if name not in sc.rings:
        errs.add(where, f"unknown ring {name!r}")
        return None
    return sc.rings[name]


def _elements(group: FiniteGroup, spec: dict, key_words: str, key_ids: str, errs: _Errors, where: str) -> list[int] | None:
    ids: list[int] = []
    for w in spec.get(key_words, []) or []:
        if not isinstance(w, list) or not all(_int(s) and 0 < abs(s) <= len(group.generators) for s in w):
            errs.add(where, f"word {w} references a missing generator (group has {len(group.generators)})")
            return None
        ids.append(group.eval_word(w))
    for x in spec.get(key_ids, []) or []:
        if not _int(x) or not 0 <= x < group.order:
            errs.add(where, f"element id {x} out of range")
            return None
        ids.append(x)
    if key_words not in spec and key_ids not in spec:
        return None
    return group.closure(ids)


def _tasks(raw, errs: _Errors) -> list[dict]:
    out = []
    if not isinstance(raw, list):
        errs.add("tasks", "must be a list")
        return out
    for i, t in enumerate(raw):
        entry = {"task": t} if isinstance(t, str) else t
        if not isinstance(entry, dict) or entry.get("task") not in TASKS:
            errs.add(f"tasks[{i}]", f"unknown task {t!r}; known: {', '.join(TASKS)}")
            continue
        if "expect" in entry and not isinstance(entry["expect"], dict):
            errs.add(f"tasks[{i}].expect", "must be an object")
            continue
        out.append(entry)
    return out


def validate(raw: dict) -> Scenario:
    """Build and check every part of a scenario; all problems are collected into one ValidationErrors."""
    errs = _Errors()
    if not isinstance(raw, dict):
        raise ValidationErrors(["scenario: must be a JSON object"])
    sc = Scenario(str(raw.get("name", "unnamed")), raw, {}, None)

    rings = raw.get("rings", {})
    if not isinstance(rings, dict):
        errs.add("rings", "must be an object")
        rings = {}
    for name in sorted(rings):
        r = errs.guard(f"rings.{name}", _build_ring, rings[name])
        if r is not None:
            sc.rings[name] = r

    if "group" not in raw:
        errs.add("group", "missing")
    else:
        sc.group = _build_group(raw["group"], errs)
    g = sc.group

    bounds = {"M": 3, "L": 6, "top": 3}
    given = raw.get("bounds", {})
    if not isinstance(given, dict):
        errs.add("bounds", "must be an object")
        given = {}
    for k, v in given.items():
        if k not in bounds or not _int(v) or v < 0:
            errs.add(f"bounds.{k}", "unknown bound or not a non-negative integer")
        else:
            bounds[k] = v
    sc.bounds = bounds
    sc.tasks = _tasks(raw.get("tasks", []), errs)
    names = {t["task"] for t in sc.tasks}

    if g is not None and names & NEEDS_RELATIONS:
        if not g.relations:
            errs.add("group.relations", "relations are required for lift enumeration")
        else:
            errs.guard("group.relations", check_presentation, g)

    if "representation" in raw and g is not None:
        spec = raw["representation"]
        k = _ring_ref(sc, spec.get("ring") if isinstance(spec, dict) else None, errs, "representation.ring")
        if k is not None:
            if not k.is_field:
                errs.add("representation.ring", "residual representation must be over a prime field")
            else:
                mats = errs.guard("representation.generators", _matrices, k, spec.get("generators"), len(g.generators))
                if mats is not None:
                    sc.residual = errs.guard("representation", ResidualRep, g, k, [k.residue(m) for m in mats])

    if "lift_ring" in raw:
        sc.lift_ring = _ring_ref(sc, raw["lift_ring"], errs, "lift_ring")
    elif sc.residual is not None:
        sc.lift_ring = dual_numbers(sc.residual.p)
    if sc.lift_ring is not None and sc.residual is not None and sc.lift_ring.p != sc.residual.p:
        errs.add("lift_ring", "characteristic differs from the residual field")

    places = raw.get("places", [])
    if not isinstance(places, list):
        errs.add("places", "must be a list")
        places = []
    for i, ps in enumerate(places):
        where = f"places[{i}]"
        if g is None or not isinstance(ps, dict):
            if g is not None:
                errs.add(where, "must be an object")
            continue
        elems = _elements(g, ps, "words", "elements", errs, where)
        if elems is None:
            errs.add(where, "needs 'words' or 'elements'")
            continue
        inertia = _elements(g, ps, "inertia_words", "inertia", errs, f"{where}.inertia")
        if inertia is not None and not set(inertia) <= set(elems):
            errs.add(f"{where}.inertia", "inertia is not inside the decomposition group")
        gbar = ps.get("gbar")
        if gbar == "auto":
            gbar = None if sc.residual is None else find_gbar(sc.residual.rep, elems)
            if gbar is None:
                errs.add(f"{where}.gbar", "no gbar puts the residual representation in upper triangular form")
        elif gbar is not None:
            gbar = np.asarray(gbar, dtype=np.int64)
        place = Place(str(ps.get("label", f"v{i}")), elems, inertia, gbar, ps.get("ambient", "gl"), ps.get("sub_flavor", "borel"))
        sc.places.append(place)
        if sc.residual is not None:
            d = errs.guard(where, borel_datum, sc.residual.rep, place.label, elems, gbar, inertia, place.ambient, place.sub_flavor)
            if d is not None:
                sc.datums.append(d)
    if len({pl.ambient for pl in sc.places}) > 1:
        errs.add("places", "all places must share one ambient module")

    if "omega" in raw and g is not None:
        vals = raw["omega"].get("values") if isinstance(raw["omega"], dict) else None
        p = sc.p
        if not isinstance(vals, list) or len(vals) != len(g.generators):
            errs.add("omega.values", f"expected {len(g.generators)} values, one per generator")
        elif p is not None:
            sc.omega = errs.guard("omega", Character.from_generators, g, p, 1, vals)

    if "surjection" in raw and g is not None:
        spec = raw["surjection"]
        if not isinstance(spec, dict):
            errs.add("surjection", "must be an object")
        else:
            src = _ring_ref(sc, spec.get("source"), errs, "surjection.source")
            tgt = _ring_ref(sc, spec.get("target"), errs, "surjection.target")
            if src is not None and tgt is not None:
                sc.surjection = errs.guard("surjection", Surjection, src, tgt, spec.get("matrix"))
                if "representation" in spec:
                    mats = errs.guard("surjection.representation", _matrices, tgt, spec["representation"], len(g.generators))
                    if mats is not None:
                        sc.surj_rep = errs.guard("surjection.representation", Representation.from_generators, g, tgt, mats)
                elif sc.residual is not None and sc.residual.field == tgt:
                    sc.surj_rep = sc.residual.rep
                elif sc.residual is not None and tgt.d == 1 and tgt.e == 1 and tgt.p == sc.residual.p:
                    sc.surj_rep = sc.residual.rep
                else:
                    errs.add("surjection.representation", "missing and the residual representation is not over the target")

    if "quasi_lift" in raw and g is not None:
        spec = raw["quasi_lift"]
        a = _ring_ref(sc, spec.get("ring") if isinstance(spec, dict) else None, errs, "quasi_lift.ring")
        if a is not None:
            sig = errs.guard("quasi_lift.sigma", _matrices, a, spec.get("sigma"), len(g.generators))
            phi = errs.guard("quasi_lift.phi", _matrices, a, spec.get("phi"), len(g.generators))
            gm = errs.guard("quasi_lift.g", _matrix, a, spec.get("g"))
            if sig is not None and phi is not None and gm is not None:
                sigma = errs.guard("quasi_lift.sigma", Representation.from_generators, g, a, sig)
                phr = errs.guard("quasi_lift.phi", Representation.from_generators, g, a, phi)
                if sigma is not None and phr is not None:
                    built = errs.guard("quasi_lift", build_quasi_hom, sigma, phr, gm)
                    if built is not None:
                        sc.quasi = built[0]

    pc = raw.get("pseudochar", {})
    if not isinstance(pc, dict):
        errs.add("pseudochar", "must be an object")
        pc = {}
    source = pc.get("source")
    if source is None:
        source = "quasi_lift" if "quasi_lift" in raw else ("lift" if sc.lift_ring is not None else "residual")
    if source not in ("quasi_lift", "lift", "residual"):
        errs.add("pseudochar.source", f"unknown source {source!r}")
    idx = pc.get("lift_index", 0)
    if not _int(idx) or idx < 0:
        errs.add("pseudochar.lift_index", "must be a non-negative integer")
    sc.pseudochar = {"source": source, "lift_index": idx}

    # every task must find the data it reads
    for t in sc.tasks:
        name = t["task"]
        where = f"tasks.{name}"
        if name in NEEDS_REP and "representation" not in raw:
            errs.add(where, "needs a representation")
        if name in NEEDS_PLACES and not sc.places:
            errs.add(where, "needs at least one place")
        if name in ("deform", "tangent") and "representation" in raw and sc.lift_ring is None:
            errs.add(where, "needs a lift ring")
        if name == "obstruction" and "surjection" not in raw:
            errs.add(where, "needs a surjection")
        if name.startswith("pseudochar"):
            if source == "quasi_lift" and "quasi_lift" not in raw:
                errs.add(where, "source quasi_lift is not defined")
            if source in ("lift", "residual") and "representation" not in raw:
                errs.add(where, f"source {source} needs a representation")
        if name in ("cohomology", "totalization") and sc.p is None:
            errs.add(where, "needs a representation or a ring to fix p")
    if errs.items:
        raise ValidationErrors(errs.items)
    return sc


# ---------------------------------------------------------------------------
# tasks


class _Context:
    """Per-run caches shared between tasks (lift lists, the pseudo-character source)."""

    def __init__(self, sc: Scenario, budget: int | None, threads: int):
        self.sc, self.budget, self.threads = sc, budget, threads
        self._lifts = None
        self._source = None

    def lifts(self):
        if self._lifts is None:
            self._lifts = enumerate_lifts(self.sc.residual, self.sc.lift_ring, self.budget, self.threads)
        return self._lifts

    def module(self) -> GModule:
        sc = self.sc
        if sc.residual is not None:
            return adjoint_module(sc.residual.rep, sc.places[0].ambient if sc.places else "gl")
        return GModule.trivial(sc.group, sc.p)

    def source(self):
        """(ring, table over the group, object for from_quasi_lift)."""
        if self._source is None:
            sc = self.sc
            kind = sc.pseudochar["source"]
            if kind == "quasi_lift":
                q = sc.quasi
                self._source = (q.ring, q.rho, q)
            elif kind == "residual":
                rep = sc.residual.rep
                self._source = (rep.ring, rep.mats, rep)
            else:
                lifts = self.lifts()
                i = sc.pseudochar["lift_index"]
                if i >= len(lifts):
                    raise ValueError(f"lift_index {i} but only {len(lifts)} lifts exist")
                rep = lifts[i].representation(sc.group)
                self._source = (rep.ring, rep.mats, rep)
        return self._source

    def table(self, mats=None):
        ring, base, src = self.source()
        sc = self.sc
        if mats is not None:
            src = Representation(sc.group, ring, mats, check=False)
        return from_quasi_lift(src, sc.bounds["M"], sc.bounds["L"], group=sc.group, budget=self.budget)


def _table_digest(t) -> str:
    h = hashlib.sha256()
    for m in sorted(t.values):
        h.update(np.ascontiguousarray(t.values[m], dtype=np.int64).tobytes())
    return h.hexdigest()


def _task_cohomology(ctx: _Context, params: dict):
    sc = ctx.sc
    top = params.get("top", sc.bounds["top"])
    m = ctx.module()
    cc = cochain_complex(sc.group, m, top + 1)
    dims = [cohomology(cc, i).dim for i in range(top + 1)]
    fixed = m.fixed_points().shape[1]
    ok = dims[0] == fixed
    return ("Pass" if ok else "Fail"), {"dims": dims, "fixed_points": fixed, "rank": m.rank, "group_order": sc.group.order}


def _task_totalization(ctx: _Context, params: dict):
    res = totalization_check(ctx.sc.group, ctx.module(), params.get("top", ctx.sc.bounds["top"]))
    return ("Pass" if res["ok"] else "Fail"), res


def _task_selmer(ctx: _Context, params: dict):
    sc = ctx.sc
    strict = bool(params.get("strict", False))
    g = ctx.module()
    places = {}
    for d in sc.datums:
        cond = (strict_local_condition if strict else local_condition)(sc.group, g, d)
        entry = {"dim_L": cond.dim_L, "dim_L_tilde": cond.dim_L_tilde, "dim_B1": cond.dim_B1}
        if sc.omega is not None:
            entry["regularity"] = check_regularity(d, sc.residual.rep, sc.omega).to_json()
        places[d.label] = entry
    out = {"places": places, "strict": strict}
    if not strict:
        out["h1_ord_tilde"] = h1_ord_tilde(sc.group, sc.datums, g)
    return "Pass", out


def _star(ctx: _Context, strict: bool):
    rep = verify_star(ctx.sc.group, ctx.sc.datums, ctx.module(), strict=strict)
    ok = rep.all_exact and rep.h0_isomorphism
    return ("Pass" if ok else "Fail"), {"strict": strict, "all_exact": rep.all_exact, **rep.to_json()}


def _task_selmer_mu(ctx: _Context, params: dict):
    return _star(ctx, True)


def _task_star(ctx: _Context, params: dict):
    return _star(ctx, bool(params.get("strict", False)))


def _task_deform(ctx: _Context, params: dict):
    sc = ctx.sc
    ring = sc.lift_ring
    lifts = ctx.lifts()
    classes = deformation_classes(lifts, ring, ctx.budget)
    out = {
        "ring": ring.to_spec(),
        "framed_lifts": len(lifts),
        "classes": len(classes.representatives),
        "centralizer_condition": sc.residual.centralizer_condition,
        "conjugation_stable": classes.conjugation_stable,
    }
    if sc.datums:
        places = [(d.elements, d.gbar) for d in sc.datums]
        out["ordinary_framed_lifts"] = sum(is_ordinary(x, sc.group, places, ctx.budget) for x in lifts)
        out["ordinary_classes"] = len(ordinary_filter(classes.representatives, sc.group, places, ctx.budget))
        out["h1_ord_tilde"] = h1_ord_tilde(sc.group, sc.datums, ctx.module())
    return "Pass", out


def _task_tangent(ctx: _Context, params: dict):
    sc = ctx.sc
    rep = tangent_check(sc.residual, ctx.budget, ctx.threads, ring=sc.lift_ring)
    out = rep.to_json()
    ok = rep.framed_ok and rep.bijection is not None and rep.bijection.ok and rep.classes_ok is not False
    return ("Pass" if ok else "Fail"), out


def _task_obstruction(ctx: _Context, params: dict):
    sc = ctx.sc
    rep = obstruction_class(sc.surj_rep, sc.surjection)
    found = exhaustive_lift_search(sc.surj_rep, sc.surjection, ctx.budget)
    out = rep.to_json()
    out["lift_found"] = found is not None
    out["lift_generators"] = None if found is None else found[sc.group.generators]
    ok = rep.is_cocycle and rep.section_independent and rep.is_zero == (found is not None)
    return ("Pass" if ok else "Fail"), out


def _task_doldkan(ctx: _Context, params: dict):
    rows = dold_kan_corpus(int(params.get("count", 200)), int(params.get("seed", 0)))
    ok = all(r["roundtrip"] and r["homotopy"] for r in rows)
    return ("Pass" if ok else "Fail"), {"complexes": rows, "count": len(rows), "all_ok": ok}


def _task_homotopy(ctx: _Context, params: dict):
    p = int(params.get("p", 3))
    rows = [homotopy_ring_check(t, j) for t in square_zero_rings(p) for j in (1, 2)]
    ok = all(r["degrees_ok"] and r["pi0_ok"] and r["action_ok"] and r["commutative_ok"] for r in rows)
    return ("Pass" if ok else "Fail"), {"cases": rows, "all_ok": ok}


def _kernel_sample(ring: FiniteLocalRing, n: int, count: int, budget) -> np.ndarray:
    ker = group_array("kernelgln", ring, n, budget)
    step = max(1, len(ker) // count)
    return ker[step // 2 :: step][:count]


def _task_pc_verify(ctx: _Context, params: dict):
    ring, base, _ = ctx.source()
    t = ctx.table()
    axioms = verify_axioms(t)
    same = []
    for u in _kernel_sample(ring, base.shape[1], int(params.get("conjugates", 2)), ctx.budget):
        ui = batch_inverse(ring, u[None])[0]
        conj = matmul(ring, matmul(ring, u[None], base), ui[None])
        same.append(ctx.table(conj).same_values(t))
    ok = axioms.ok and all(same)
    out = {"axioms": axioms.to_json(), "conjugate_tables_identical": same, "table_sha256": _table_digest(t), "M": t.M, "L": t.L}
    return ("Pass" if ok else "Fail"), out


def _task_pc_reflect(ctx: _Context, params: dict):
    rep = reflection_check(ctx.table())
    return rep.verdict, rep.to_json()


def _task_pc_reconstruct(ctx: _Context, params: dict):
    ring, base, _ = ctx.source()
    rec = reconstruct(ctx.table(), ctx.sc.residual, ctx.budget)
    w = conj_equivalent(rec.table, base, ring, ctx.budget)
    ok = rec.quasi_ok and rec.table_matches and w.equivalent
    out = {"generator_tuple": rec.generator_tuple, "quasi_ok": rec.quasi_ok, "table_matches": rec.table_matches, "conj_equivalent": w.to_json()}
    return ("Pass" if ok else "Fail"), out


_RUNNERS = {
    "cohomology": _task_cohomology,
    "selmer": _task_selmer,
    "selmer-mu": _task_selmer_mu,
    "star": _task_star,
    "deform": _task_deform,
    "tangent": _task_tangent,
    "obstruction": _task_obstruction,
    "doldkan-roundtrip": _task_doldkan,
    "homotopy-ring": _task_homotopy,
    "totalization": _task_totalization,
    "pseudochar-verify": _task_pc_verify,
    "pseudochar-reflect": _task_pc_reflect,
    "pseudochar-reconstruct": _task_pc_reconstruct,
}


def _lookup(result: dict, path: str):
    cur = result
    for part in path.split("."):
        if not isinstance(cur, dict) or part not in cur:
            return None
        cur = cur[part]
    return cur


def run(sc: Scenario, select: list[str] | None = None, budget: int | None = None, threads: int = 1, timings: bool = False) -> dict:
    """Run the selected tasks in scenario order and assemble the report.

    Library errors (budget exhaustion, failed searches) become a Fail verdict
    with an "error" field on that task; the remaining tasks still run.
    """
    tasks = sc.tasks
    if select:
        unknown = [s for s in select if s not in TASKS]
        if unknown:
            raise ValidationErrors([f"--task: unknown task {s!r}" for s in unknown])
        listed = {t["task"]: t for t in tasks}
        tasks = [listed.get(s, {"task": s}) for s in dict.fromkeys(select)]
    ctx = _Context(sc, budget, threads)
    entries = []
    for t in tasks:
        name = t["task"]
        params = {k: v for k, v in t.items() if k not in ("task", "expect")}
        start = time.perf_counter()
        entry: dict = {"task": name}
        try:
            verdict, result = _RUNNERS[name](ctx, params)
            result = plain(result)
            entry["result"] = result
        except BudgetExceeded as exc:
            verdict = "Fail"
            entry["error"] = {"type": "BudgetExceeded", "message": str(exc), "needed": exc.needed, "budget": exc.budget}
        except (DerivlabError, ValueError) as exc:
            verdict = "Fail"
            entry["error"] = {"type": type(exc).__name__, "message": str(exc)}
        if "expect" in t and "result" in entry:
            bad = {k: {"expected": v, "got": _lookup(entry["result"], k)} for k, v in sorted(t["expect"].items()) if _lookup(entry["result"], k) != v}
            if bad:
                entry["expect_mismatch"] = bad
                verdict = "Fail"
        entry["verdict"] = verdict
        if timings:
            entry["seconds"] = round(time.perf_counter() - start, 3)
        entries.append(entry)
    summary = {v: sum(e["verdict"] == v for e in entries) for v in VERDICTS}
    return {
        "schema_version": REPORT_SCHEMA,
        "tool_version": __version__,
        "scenario": sc.name,
        "tasks": entries,
        "summary": summary,
    }


# ---------------------------------------------------------------------------
# entry point


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _errors_report(errors: list[str]) -> str:
    return canonical({"valid": False, "errors": errors})


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="derivlab", description="Exact deformation-theory computations driven by scenario files.")
    sub = parser.add_subparsers(dest="command", required=True)
    pv = sub.add_parser("validate", help="check a scenario file and list every problem")
    pv.add_argument("file")
    pr = sub.add_parser("run", help="run the tasks of a scenario and print a JSON report")
    pr.add_argument("file")
    pr.add_argument("--task", action="append", dest="tasks", metavar="T", help=f"run only these tasks ({', '.join(TASKS)})")
    pr.add_argument("--budget", type=int, default=None, help="candidate budget (default: DERIVLAB_BUDGET or built-in)")
    pr.add_argument("--out", default=None, help="write the report here instead of standard output")
    pr.add_argument("--threads", type=int, default=1, help="worker threads for lift enumeration")
    pr.add_argument("--timings", action="store_true", help="add wall-clock seconds per task (makes reports non-reproducible)")
    pf = sub.add_parser("fixture", help="print a bundled scenario")
    pf.add_argument("name", help=", ".join(FIXTURE_NAMES))
    pf.add_argument("--out", default=None)
    args = parser.parse_args(argv)

    if args.command == "fixture":
        try:
            _write(canonical(fixture(args.name)), args.out)
        except UnknownFixture as exc:
            sys.stderr.write(f"error: {exc.args[0]}\n")
            return 2
        return 0

    try:
        sc = validate(load_json(args.file))
    except ParseError as exc:
        sys.stdout.write(_errors_report([str(exc)]))
        return 2
    except ValidationErrors as exc:
        sys.stdout.write(_errors_report(exc.errors))
        return 2

    if args.command == "validate":
        sys.stdout.write(canonical({"valid": True, "scenario": sc.name, "tasks": [t["task"] for t in sc.tasks], "group_order": sc.group.order}))
        return 0

    try:
        report = run(sc, args.tasks, args.budget, max(1, args.threads), args.timings)
    except ValidationErrors as exc:
        sys.stdout.write(_errors_report(exc.errors))
        return 2
    _write(canonical(report), args.out)
    return 1 if report["summary"]["Fail"] else 0


if __name__ == "__main__":
    sys.exit(main())

"""Bundled scenarios, reproducible inputs for the acceptance suite and the CLI."""

from __future__ import annotations

import copy

from .errors import UnknownFixture

SCHEMA = 1

S3 = {"permutations": [[1, 0, 2], [1, 2, 0]], "relations": [[1, 1], [2, 2, 2], [1, 2, 1, 2]], "name": "S3"}


def _cyclic(n: int) -> dict:
    return {"cyclic": n}


_FIXTURES = {
    "z3_gl1_f3": {
        "name": "z3_gl1_f3",
        "schema": SCHEMA,
        "rings": {"k": {"kind": "prime_field", "p": 3}, "A": {"kind": "dual_numbers", "p": 3}, "B": {"kind": "z_mod_pe", "p": 3, "e": 2}},
        "group": _cyclic(3),
        "representation": {"ring": "k", "generators": [[[1]]]},
        "lift_ring": "A",
        "places": [{"label": "v", "words": [[1]], "inertia_words": [[1]]}],
        "surjection": {"source": "B", "target": "k", "matrix": [[1]]},
        "pseudochar": {"source": "lift", "lift_index": 1},
        "bounds": {"M": 3, "L": 6, "top": 3},
        "tasks": [
            {"task": "cohomology", "expect": {"dims": [1, 1, 1, 1]}},
            "totalization",
            "selmer",
            "selmer-mu",
            "star",
            {"task": "deform", "expect": {"framed_lifts": 3, "classes": 3}},
            {"task": "tangent", "expect": {"framed_lifts": 3, "Z1_size": 3, "classes": 3, "H1_size": 3}},
            "obstruction",
            "pseudochar-verify",
            "pseudochar-reflect",
            "pseudochar-reconstruct",
            {"task": "doldkan-roundtrip", "count": 20},
            "homotopy-ring",
        ],
    },
    "s3_gl2_f5": {
        "name": "s3_gl2_f5",
        "schema": SCHEMA,
        "rings": {"k": {"kind": "prime_field", "p": 5}, "A": {"kind": "dual_numbers", "p": 5}, "B": {"kind": "z_mod_pe", "p": 5, "e": 2}},
        "group": S3,
        "representation": {"ring": "k", "generators": [[[0, 1], [1, 0]], [[0, 4], [1, 4]]]},
        "lift_ring": "A",
        "places": [{"label": "v", "words": [[1]], "inertia_words": [[1]], "gbar": [[0, 1], [1, 1]]}],
        "omega": {"values": [4, 1]},
        "surjection": {"source": "B", "target": "k", "matrix": [[1]]},
        "pseudochar": {"source": "lift", "lift_index": 77},
        "bounds": {"M": 3, "L": 6, "top": 3},
        "tasks": [
            {"task": "cohomology", "expect": {"dims": [1, 0, 0, 0]}},
            "totalization",
            "selmer",
            "selmer-mu",
            "star",
            {"task": "deform", "expect": {"framed_lifts": 125, "classes": 1}},
            {"task": "tangent", "expect": {"framed_lifts": 125, "Z1_size": 125, "classes": 1, "H1_size": 1}},
            {"task": "obstruction", "expect": {"zero": True, "lift_found": True}},
            "pseudochar-verify",
            "pseudochar-reflect",
            "pseudochar-reconstruct",
        ],
    },
    "zl_coprime": {
        "name": "zl_coprime",
        "schema": SCHEMA,
        "rings": {"k": {"kind": "prime_field", "p": 5}, "A": {"kind": "dual_numbers", "p": 5}, "B": {"kind": "z_mod_pe", "p": 5, "e": 2}},
        "group": _cyclic(4),
        "representation": {"ring": "k", "generators": [[[2, 0], [0, 1]]]},
        "lift_ring": "A",
        "places": [{"label": "v", "words": [[1]], "inertia_words": [[1]]}],
        "surjection": {"source": "B", "target": "k", "matrix": [[1]]},
        "pseudochar": {"source": "lift", "lift_index": 0},
        "bounds": {"M": 3, "L": 6, "top": 3},
        "tasks": [
            {"task": "cohomology", "expect": {"dims": [2, 0, 0, 0]}},
            "totalization",
            "selmer",
            "star",
            "tangent",
            {"task": "obstruction", "expect": {"zero": True, "lift_found": True}},
            "pseudochar-verify",
            "pseudochar-reflect",
        ],
    },
    "ordinary_toy": {
        "name": "ordinary_toy",
        "schema": SCHEMA,
        "rings": {"k": {"kind": "prime_field", "p": 3}, "A": {"kind": "dual_numbers", "p": 3}},
        "group": {"product": [S3, _cyclic(3)]},
        "representation": {"ring": "k", "generators": [[[0, 1], [1, 0]], [[0, 2], [1, 2]], [[1, 0], [0, 1]]]},
        "lift_ring": "A",
        "places": [{"label": "v", "words": [[1], [3]], "inertia_words": [[3]], "gbar": [[0, 1], [1, 1]]}],
        "omega": {"values": [2, 1, 1]},
        "bounds": {"M": 2, "L": 3, "top": 1},
        "tasks": ["cohomology", "selmer", "deform", "tangent"],
    },
    "zp2_obstruction": {
        "name": "zp2_obstruction",
        "schema": SCHEMA,
        "rings": {"k": {"kind": "prime_field", "p": 5}, "B": {"kind": "z_mod_pe", "p": 5, "e": 2}},
        "group": _cyclic(5),
        "representation": {"ring": "k", "generators": [[[1, 1], [0, 1]]]},
        "surjection": {"source": "B", "target": "k", "matrix": [[1]]},
        "bounds": {"M": 2, "L": 3, "top": 2},
        "tasks": [{"task": "obstruction", "expect": {"zero": False, "lift_found": False}}],
    },
    "z10_quasi_lift": {
        "name": "z10_quasi_lift",
        "schema": SCHEMA,
        "rings": {"k": {"kind": "prime_field", "p": 5}, "A": {"kind": "dual_numbers", "p": 5}},
        "group": _cyclic(10),
        "representation": {"ring": "k", "generators": [[[4, 0], [0, 4]]]},
        "quasi_lift": {
            "ring": "A",
            "sigma": [[[4, 0], [0, 4]]],
            "phi": [[[1, 1], [0, 1]]],
            "g": [[[1, 0], [0, 0]], [[0, 1], [1, 0]]],
        },
        "pseudochar": {"source": "quasi_lift"},
        "bounds": {"M": 3, "L": 6, "top": 2},
        "tasks": ["pseudochar-verify", "pseudochar-reflect"],
    },
}

NAMES = tuple(_FIXTURES)


def fixture(name: str) -> dict:
    if name not in _FIXTURES:
        raise UnknownFixture(f"unknown fixture {name!r}; bundled: {', '.join(NAMES)}")
    return copy.deepcopy(_FIXTURES[name])

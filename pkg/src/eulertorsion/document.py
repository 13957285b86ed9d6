"""The TwistedComplex JSON document: schema, parsing and canonical serialization."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .duality import ChainDualityData
from .errors import InputError
from .euler import Spider
from .metrics import HermitianMetricAssignment
from .report import canonical_dumps
from .twisted import AnalyticFamily, Cell, GroupWord, Representation, TwistedComplexPresentation

_number = {"type": "number"}
_complex = {"oneOf": [_number, {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}]}
_matrix = {"type": "array", "items": {"type": "array", "items": _complex}}
_word = {"type": "array",
         "items": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}}
_cell_key = "^[0-9]+:[0-9]+$"
_boundaries = {"type": "array", "items": {"type": "array", "items": {"type": "array", "items": {
    "type": "array", "items": {"type": "array", "prefixItems": [{"type": "integer"}, _word],
                               "minItems": 2, "maxItems": 2}}}}}
_monomial = {"type": "array", "prefixItems": [_complex, {"type": "array", "items": {"type": "integer"}}],
             "minItems": 2, "maxItems": 2}

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["meta", "cells", "generators", "boundaries"],
    "additionalProperties": False,
    "properties": {
        "meta": {"type": "object", "required": ["name", "dimension"], "additionalProperties": False,
                 "properties": {"name": {"type": "string"}, "dimension": {"type": "integer", "minimum": 0},
                                "provenance": {"type": "string"}}},
        "cells": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        "generators": {"type": "array", "items": {"type": "string"}},
        "relators": {"type": "array", "items": _word},
        "abelianization": {"type": "object", "required": ["matrix", "torsion_orders"],
                           "additionalProperties": False,
                           "properties": {"matrix": {"type": "array", "items": {
                               "type": "array", "items": {"type": "integer"}}},
                               "torsion_orders": {"type": "array",
                                                  "items": {"type": "integer", "minimum": 0}}}},
        "sampler": {"type": "string", "pattern": "^(free|abelian|cyclic:[0-9]+)$"},
        "base_cell": {"type": "integer", "minimum": 0},
        "boundaries": _boundaries,
        "spiders": {"type": "object", "additionalProperties": {
            "type": "object", "required": ["base_cell", "legs"], "additionalProperties": False,
            "properties": {"base_cell": {"type": "integer", "minimum": 0},
                           "legs": {"type": "object", "propertyNames": {"pattern": _cell_key},
                                    "additionalProperties": _word}}}},
        "metrics": {"type": "object", "additionalProperties": {
            "type": "object", "required": ["rank"], "additionalProperties": False,
            "properties": {"rank": {"type": "integer", "minimum": 1},
                           "cells": {"type": "object", "propertyNames": {"pattern": _cell_key},
                                     "additionalProperties": _matrix}}}},
        "families": {"type": "object", "additionalProperties": {
            "type": "object", "required": ["variables", "generators"], "additionalProperties": False,
            "properties": {"variables": {"type": "integer", "minimum": 0},
                           "real_locus": {"type": "string"},
                           "generators": {"type": "array", "items": {"type": "array", "items": {
                               "type": "array", "items": {"type": "array", "items": _monomial}}}}}}},
        "representations": {"type": "object", "additionalProperties": {
            "type": "object", "required": ["matrices"], "additionalProperties": False,
            "properties": {"matrices": {"type": "array", "items": _matrix}}}},
        "dual": {"type": "object", "required": ["cells", "boundaries", "correspondence", "pairings"],
                 "additionalProperties": False,
                 "properties": {"name": {"type": "string"},
                                "cells": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                                "boundaries": _boundaries,
                                "base_cell": {"type": "integer", "minimum": 0},
                                "correspondence": {"type": "object", "propertyNames": {"pattern": _cell_key},
                                                   "additionalProperties": {"type": "string",
                                                                            "pattern": _cell_key}},
                                "pairings": {"type": "array", "items": _matrix}}},
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else "/"


def cell_key(cell: Cell) -> str:
    return f"{cell[0]}:{cell[1]}"


def parse_cell(key: str) -> Cell:
    d, i = key.split(":")
    return (int(d), int(i))


def parse_complex(x) -> complex:
    return complex(x[0], x[1]) if isinstance(x, list) else complex(x)


def complex_json(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def parse_matrix(rows) -> np.ndarray:
    return np.array([[parse_complex(x) for x in row] for row in rows], dtype=complex)


def matrix_json(m) -> list:
    return [[complex_json(x) for x in row] for row in np.atleast_2d(m)]


def parse_word(w) -> GroupWord:
    return GroupWord.from_powers((g, k) for g, k in w)


def _parse_boundaries(raw) -> tuple:
    return tuple(tuple(tuple(tuple((int(c), parse_word(w)) for c, w in entry) for entry in row)
                       for row in block) for block in raw)


def _boundaries_json(blocks) -> list:
    return [[[[[c, w.to_json()] for c, w in entry] for entry in row] for row in block] for block in blocks]


@dataclass
class TwistedComplexDocument:
    presentation: TwistedComplexPresentation
    spiders: dict[str, Spider] = field(default_factory=dict)
    metrics: dict[str, HermitianMetricAssignment] = field(default_factory=dict)
    families: dict[str, AnalyticFamily] = field(default_factory=dict)
    representations: dict[str, Representation] = field(default_factory=dict)
    duality: ChainDualityData | None = None

    @property
    def name(self) -> str:
        return self.presentation.name

    def spider(self, name: str | None) -> Spider:
        if name is None:
            return self.spiders.get("straight") or Spider.straight(self.presentation)
        if name not in self.spiders:
            raise InputError(f"unknown spider {name!r}", "/spiders")
        return self.spiders[name]

    def metric(self, name: str | None, rank: int) -> HermitianMetricAssignment:
        if name is None or name == "flat":
            return HermitianMetricAssignment.flat(rank)
        if name not in self.metrics:
            raise InputError(f"unknown metric {name!r}", "/metrics")
        return self.metrics[name]

    def family(self, name: str) -> AnalyticFamily:
        if name not in self.families:
            raise InputError(f"unknown family {name!r}", "/families")
        return self.families[name]

    def to_json(self) -> dict:
        P = self.presentation
        out: dict[str, Any] = {
            "meta": {"name": P.name, "dimension": P.top},
            "cells": list(P.cell_counts),
            "generators": list(P.generators),
            "relators": [w.to_json() for w in P.relators],
            "abelianization": {"matrix": [list(r) for r in P.abelianization],
                               "torsion_orders": list(P.torsion_orders)},
            "sampler": P.sampler,
            "base_cell": P.base_cell,
            "boundaries": _boundaries_json(P.boundaries),
        }
        if P.provenance:
            out["meta"]["provenance"] = P.provenance
        if self.spiders:
            out["spiders"] = {n: {"base_cell": s.base[1],
                                  "legs": {cell_key(c): w.to_json() for c, w in s.legs}}
                              for n, s in self.spiders.items()}
        if self.metrics:
            out["metrics"] = {n: {"rank": h.rank, "cells": {cell_key(c): matrix_json(m) for c, m in h.matrices}}
                              for n, h in self.metrics.items()}
        if self.families:
            out["families"] = {}
            for n, f in self.families.items():
                entry = {"variables": f.variables,
                         "generators": [[[[[complex_json(c), list(ex)] for c, ex in poly] for poly in row]
                                         for row in gen] for gen in f.entries]}
                if f.real_locus:
                    entry["real_locus"] = f.real_locus
                out["families"][n] = entry
        if self.representations:
            out["representations"] = {n: {"matrices": [matrix_json(m) for m in r.matrices]}
                                      for n, r in self.representations.items()}
        if self.duality is not None:
            D = self.duality
            out["dual"] = {"name": D.dual.name, "cells": list(D.dual.cell_counts),
                           "boundaries": _boundaries_json(D.dual.boundaries),
                           "base_cell": D.dual_base[1],
                           "correspondence": {cell_key(a): cell_key(b) for a, b in D.correspondence},
                           "pairings": [matrix_json(m) if m.size else [] for m in D.pairings]}
        return out

    def dumps(self, pretty: bool = False) -> str:
        return canonical_dumps(self.to_json(), pretty)


def _guard(pointer: str, fn, *args):
    try:
        return fn(*args)
    except InputError as exc:
        raise InputError(str(exc).split(": ", 1)[-1], pointer + (exc.pointer or "")) from exc
    except (ValueError, TypeError, KeyError, np.linalg.LinAlgError) as exc:
        raise InputError(str(exc), pointer) from exc


def parse_document(data: Any) -> TwistedComplexDocument:
    """Validate against the schema, then build and re-check every object."""
    errors = sorted(_VALIDATOR.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise InputError(err.message, _pointer(err.absolute_path))
    meta = data["meta"]
    cells = data["cells"]
    if meta["dimension"] != len(cells) - 1:
        raise InputError(f"dimension {meta['dimension']} does not match {len(cells)} cell counts",
                         "/meta/dimension")
    ab = data.get("abelianization", {"matrix": [], "torsion_orders": []})
    P = _guard("", TwistedComplexPresentation,
               meta["name"], tuple(cells), tuple(data["generators"]), _parse_boundaries(data["boundaries"]),
               tuple(parse_word(w) for w in data.get("relators", [])),
               tuple(tuple(r) for r in ab["matrix"]), tuple(ab["torsion_orders"]),
               data.get("base_cell", 0), data.get("sampler", "free"), meta.get("provenance", ""))
    doc = TwistedComplexDocument(P)
    for n, s in data.get("spiders", {}).items():
        ptr = f"/spiders/{n}"
        spider = Spider((0, s["base_cell"]), {parse_cell(k): parse_word(w) for k, w in s["legs"].items()})
        _guard(ptr, spider.validate, P)
        doc.spiders[n] = spider
    for n, m in data.get("metrics", {}).items():
        mats = {parse_cell(k): parse_matrix(v) for k, v in m.get("cells", {}).items()}
        bad = [c for c in mats if c not in set(P.cells())]
        if bad:
            raise InputError(f"metric names unknown cell {bad[0]}", f"/metrics/{n}/cells")
        doc.metrics[n] = _guard(f"/metrics/{n}", HermitianMetricAssignment, m["rank"], mats)
    for n, f in data.get("families", {}).items():
        entries = tuple(tuple(tuple(tuple((parse_complex(c), tuple(ex)) for c, ex in poly) for poly in row)
                              for row in gen) for gen in f["generators"])
        fam = AnalyticFamily(n, f["variables"], entries, f.get("real_locus"))
        if len(entries) != P.ngens:
            raise InputError(f"family needs {P.ngens} generator matrices", f"/families/{n}/generators")
        for g, gen in enumerate(entries):
            if any(len(row) != len(gen) for row in gen):
                raise InputError("matrix must be square", f"/families/{n}/generators/{g}")
            for row in gen:
                for poly in row:
                    for _, ex in poly:
                        if len(ex) != fam.variables:
                            raise InputError("exponent vector length must equal the number of variables",
                                             f"/families/{n}/generators/{g}")
        doc.families[n] = fam
    for n, r in data.get("representations", {}).items():
        ptr = f"/representations/{n}"
        rep = _guard(ptr, Representation, [parse_matrix(m) for m in r["matrices"]])
        _guard(ptr, rep.validate, P)
        doc.representations[n] = rep
    if "dual" in data:
        d = data["dual"]
        dualP = _guard("/dual", TwistedComplexPresentation,
                       d.get("name", P.name + "*"), tuple(d["cells"]), P.generators,
                       _parse_boundaries(d["boundaries"]), P.relators, P.abelianization, P.torsion_orders,
                       d.get("base_cell", 0), P.sampler, "")
        table = {parse_cell(k): parse_cell(v) for k, v in d["correspondence"].items()}
        pairings = [parse_matrix(m) if m else np.zeros((0, 0)) for m in d["pairings"]]
        D = _guard("/dual", ChainDualityData, dualP, table, pairings, (0, d.get("base_cell", 0)))
        _guard("", D.validate, P)
        doc.duality = D
    return doc


def loads(text: str) -> TwistedComplexDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc.msg} at line {exc.lineno}", "/") from exc
    return parse_document(data)


def load(path: str | Path) -> TwistedComplexDocument:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}", None) from exc
    return loads(text)

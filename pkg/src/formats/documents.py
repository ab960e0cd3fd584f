"""
JSON documents for complexes, ring elements and quotient specs.

Complex document:
    {"name": str, "generators": r, "model": "free" | "free_abelian" | "presented",
     "relators": [[ints]...]  (presented only),
     "cells": [a_0, ...], "boundaries": [RingMatrix...],
     "towers": {name: [QuotientSpec...]}}

RingElement: [{"coef": [num, den], "word": [ints]}...]
RingMatrix:  {"rows": r, "cols": c, "entries": [{"r": i, "c": j, "elem": RingElement}...]}
QuotientSpec: {"kind": "finite_images", "images": [...], "modulus": m (matrix images only)}
            | {"kind": "mod_lattice", "moduli": [m_1, ...]}
            | {"kind": "free_abelianization", "exponents": [[...]...]}
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Tuple

from ..complex.cochain import EquivariantComplex
from ..errors import GeneratorRangeError, L2ApproxError, SchemaError
from ..group.quotients import QuotientKind, QuotientSpec
from ..group.words import GroupModel, GroupWord, ModelKind
from ..ring.element import RingElement
from ..ring.matrix import RingMatrix


@dataclass
class ParsedComplex:
    model: GroupModel
    cell_counts: Tuple[int, ...]
    boundaries: Tuple[RingMatrix, ...]
    name: str = ""
    towers: Dict[str, List[QuotientSpec]] = field(default_factory=dict)


def _require(document: Dict, key: str, kind: type, where: str) -> Any:
    if not isinstance(document, dict) or key not in document:
        raise SchemaError(f"{where}: missing '{key}'")
    value = document[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise SchemaError(f"{where}: '{key}' must be {kind.__name__}, got {type(value).__name__}")
    return value


# Ring elements and matrices

def element_to_json(u: RingElement) -> List[Dict]:
    return [
        {"coef": [coef.numerator, coef.denominator], "word": list(word.letters)}
        for word, coef in u.terms
    ]


def element_from_json(data: Any, model: GroupModel) -> RingElement:
    if not isinstance(data, list):
        raise SchemaError("ring element must be a list of terms")
    terms = []
    for term in data:
        coef = _require(term, "coef", list, "term")
        word = _require(term, "word", list, "term")
        if len(coef) != 2 or not all(isinstance(x, int) for x in coef) or coef[1] == 0:
            raise SchemaError(f"coefficient must be [num, den] with den != 0, got {coef}")
        if not all(isinstance(x, int) for x in word):
            raise SchemaError(f"word must be a list of integers, got {word}")
        terms.append((word, Fraction(coef[0], coef[1])))
    try:
        return RingElement.from_terms(model, terms)
    except GeneratorRangeError as exc:
        raise SchemaError(str(exc)) from exc


def matrix_to_json(M: RingMatrix) -> Dict:
    return {
        "rows": M.rows,
        "cols": M.cols,
        "entries": [{"r": r, "c": c, "elem": element_to_json(e)} for (r, c), e in M.entries()],
    }


def matrix_from_json(data: Any, model: GroupModel) -> RingMatrix:
    rows = _require(data, "rows", int, "matrix")
    cols = _require(data, "cols", int, "matrix")
    entries = {}
    for entry in _require(data, "entries", list, "matrix"):
        key = (_require(entry, "r", int, "entry"), _require(entry, "c", int, "entry"))
        if key in entries:
            raise SchemaError(f"matrix entry {key} given twice")
        entries[key] = element_from_json(entry.get("elem"), model)
    try:
        return RingMatrix(rows, cols, model, entries)
    except L2ApproxError as exc:
        raise SchemaError(str(exc)) from exc


# Quotient specs

def quotient_to_json(q: QuotientSpec) -> Dict:
    document: Dict[str, Any] = {"name": q.name, "kind": q.kind.value}
    if q.kind is QuotientKind.FINITE_IMAGES:
        if q.permutations:
            document["images"] = [list(p) for p in q.permutations]
        else:
            document["images"] = [[list(row) for row in mat] for mat in q.matrices]
            document["modulus"] = q.modulus
    elif q.kind is QuotientKind.MOD_LATTICE:
        document["moduli"] = list(q.moduli)
    else:
        document["exponents"] = [list(row) for row in q.exponents]
    return document


def quotient_from_json(data: Any, name: str = "") -> QuotientSpec:
    kind = _require(data, "kind", str, "quotient")
    name = data.get("name", name) or kind
    try:
        if kind == QuotientKind.FINITE_IMAGES.value:
            images = _require(data, "images", list, "quotient")
            if images and all(isinstance(img, list) and img and isinstance(img[0], list) for img in images):
                modulus = _require(data, "modulus", int, "quotient")
                return QuotientSpec.from_matrices(images, modulus, name=name)
            return QuotientSpec.from_permutations(images, name=name)
        if kind == QuotientKind.MOD_LATTICE.value:
            return QuotientSpec.lattice(_require(data, "moduli", list, "quotient"), name=name)
        if kind == QuotientKind.FREE_ABELIANIZATION.value:
            exponents = _require(data, "exponents", list, "quotient")
            return QuotientSpec.abelianization(len(exponents[0]) if exponents else 0, exponents, name=name)
    except (L2ApproxError, TypeError, IndexError) as exc:
        raise SchemaError(f"quotient '{name}': {exc}") from exc
    raise SchemaError(f"unknown quotient kind '{kind}'")


# Complexes

def parse_complex_document(document: Any) -> ParsedComplex:
    """Schema validation only; the chain condition is checked by build_complex"""
    rank = _require(document, "generators", int, "complex")
    kind = document.get("model", "free")
    try:
        model_kind = ModelKind(kind)
    except ValueError:
        raise SchemaError(f"unknown model '{kind}'") from None

    towers: Dict[str, List[QuotientSpec]] = {}
    for tower_name, levels in (document.get("towers") or {}).items():
        if not isinstance(levels, list) or not levels:
            raise SchemaError(f"tower '{tower_name}' must be a nonempty list")
        towers[tower_name] = [quotient_from_json(q, f"{tower_name}[{i}]") for i, q in enumerate(levels)]
        for q in towers[tower_name]:
            if q.rank != rank:
                raise SchemaError(f"quotient '{q.name}' covers {q.rank} generators, model has {rank}")

    try:
        if model_kind is ModelKind.PRESENTED:
            relators = [GroupWord(tuple(r)) for r in _require(document, "relators", list, "complex")]
            quotients = [q for levels in towers.values() for q in levels]
            model = GroupModel.presented(rank, relators, quotients)
            for r in relators:
                model.word(r.letters)
        elif model_kind is ModelKind.FREE_ABELIAN:
            model = GroupModel.free_abelian(rank)
        else:
            model = GroupModel.free(rank)
    except L2ApproxError as exc:
        raise SchemaError(str(exc)) from exc

    cells = _require(document, "cells", list, "complex")
    if not all(isinstance(a, int) for a in cells):
        raise SchemaError(f"cells must be integers, got {cells}")
    boundaries = [matrix_from_json(d, model) for d in _require(document, "boundaries", list, "complex")]
    return ParsedComplex(model, tuple(cells), tuple(boundaries), document.get("name", ""), towers)


def complex_to_document(C: EquivariantComplex) -> Dict:
    document: Dict[str, Any] = {
        "name": C.name,
        "generators": C.model.rank,
        "model": C.model.kind.value,
        "cells": list(C.cell_counts),
        "boundaries": [matrix_to_json(d) for d in C.boundaries],
        "towers": {name: [quotient_to_json(q) for q in levels] for name, levels in C.towers.items()},
    }
    if C.model.kind is ModelKind.PRESENTED:
        document["relators"] = [list(r.letters) for r in C.model.relators]
    return document


def read_document(path: str) -> Dict:
    """
    Load a JSON document

    Raises:
        FileNotFoundError, json.JSONDecodeError as the caller's input errors
    """
    with open(path, 'r') as f:
        return json.load(f)

import json

import pytest

from src.catalog.builtin import affine_quotient, congruence_tower, factorial_tower
from src.complex.cochain import load_complex
from src.engine.orchestrator import approximate_invariants
from src.errors import SchemaError
from src.formats.documents import (
    complex_to_document, element_from_json, element_to_json, quotient_from_json, quotient_to_json,
)
from src.formats.reports import (
    LEVEL_COLUMNS, checks_csv, checks_to_dict, dumps_json, dumps_report, report_csv, report_from_dict,
    sdf_csv, spectra_csv,
)
from src.group.quotients import QuotientSpec
from src.group.words import GroupModel
from src.ring.element import RingElement
from src.spectral.bounds import CheckResult

TORUS_DOCUMENT = {
    "name": "torus",
    "generators": 2,
    "model": "free_abelian",
    "cells": [1, 2, 1],
    "boundaries": [
        {"rows": 1, "cols": 2, "entries": [
            {"r": 0, "c": 0, "elem": [{"coef": [1, 1], "word": [1]}, {"coef": [-1, 1], "word": []}]},
            {"r": 0, "c": 1, "elem": [{"coef": [1, 1], "word": [2]}, {"coef": [-1, 1], "word": []}]},
        ]},
        {"rows": 2, "cols": 1, "entries": [
            {"r": 0, "c": 0, "elem": [{"coef": [1, 1], "word": []}, {"coef": [-1, 1], "word": [2]}]},
            {"r": 1, "c": 0, "elem": [{"coef": [1, 1], "word": [1]}, {"coef": [-1, 1], "word": []}]},
        ]},
    ],
    "towers": {"square": [{"kind": "mod_lattice", "moduli": [2, 2]}]},
}


@pytest.mark.parametrize("fixture", ["torus", "wedge2", "bs12"])
def test_complex_document_round_trip(request, fixture):
    example = request.getfixturevalue(fixture)
    document = complex_to_document(example.complex)
    reloaded = load_complex(json.loads(json.dumps(document)))
    assert reloaded.cell_counts == example.complex.cell_counts
    assert reloaded.boundaries == example.complex.boundaries
    assert reloaded.model.kind == example.complex.model.kind
    assert set(reloaded.towers) == set(example.complex.towers)
    assert complex_to_document(reloaded) == document


def test_hand_written_document(torus):
    C = load_complex(TORUS_DOCUMENT)
    assert C.boundaries == torus.complex.boundaries
    assert C.towers["square"][0].moduli == (2, 2)


def test_element_json():
    model = GroupModel.free(2)
    u = RingElement.from_terms(model, [((1, -2), 3), ((), -1)])
    data = element_to_json(u)
    assert element_from_json(data, model) == u
    with pytest.raises(SchemaError):
        element_from_json([{"coef": [1, 0], "word": []}], model)
    with pytest.raises(SchemaError):
        element_from_json([{"coef": [1, 1], "word": [3]}], model)


@pytest.mark.parametrize("q", [
    affine_quotient(5),
    congruence_tower(1)[0],
    QuotientSpec.lattice([4, 6]),
    QuotientSpec.abelianization(2),
])
def test_quotient_json(q):
    data = json.loads(json.dumps(quotient_to_json(q)))
    restored = quotient_from_json(data)
    assert restored.kind == q.kind
    assert restored.name == q.name
    assert quotient_to_json(restored) == quotient_to_json(q)


def test_matrix_images_carry_modulus():
    data = quotient_to_json(congruence_tower(2)[1])
    assert data["modulus"] == 4
    del data["modulus"]
    with pytest.raises(SchemaError):
        quotient_from_json(data)


def _document(**changes):
    document = json.loads(json.dumps(TORUS_DOCUMENT))
    document.update(changes)
    return document


def test_schema_errors():
    missing = _document()
    del missing["generators"]
    with pytest.raises(SchemaError):
        load_complex(missing)
    with pytest.raises(SchemaError):
        load_complex(_document(towers={"bad": [{"kind": "mod_lattice", "moduli": [2, 2, 2]}]}))
    with pytest.raises(SchemaError):
        load_complex(_document(towers={"empty": []}))
    with pytest.raises(SchemaError):
        load_complex(_document(model="presented"))
    with pytest.raises(SchemaError):
        load_complex(_document(model="hyperbolic"))
    with pytest.raises(SchemaError):
        quotient_from_json({"kind": "wreath"})


@pytest.mark.asyncio
async def test_report_json_round_trip(circle):
    report = await approximate_invariants(circle.complex, 0, factorial_tower(4), "factorial",
                                          grid=(0.0, 1.0, 2.0))
    text = dumps_report(report)
    restored = report_from_dict(json.loads(text))
    assert restored.levels[2].betti == report.levels[2].betti
    assert restored.bracket == report.bracket
    assert json.loads(dumps_report(restored)) == json.loads(text)

    broken = json.loads(text)
    del broken["limit"]
    with pytest.raises(SchemaError):
        report_from_dict(broken)


@pytest.mark.asyncio
async def test_csv_outputs(wedge2):
    report = await approximate_invariants(wedge2.complex, 0, congruence_tower(2), "congruence",
                                          grid=(0.5, 1.0), with_abelian=False)
    lines = report_csv(report).splitlines()
    assert lines[0].split(",") == list(LEVEL_COLUMNS)
    assert len(lines) == 3

    sdf_lines = sdf_csv(report, (0.5, 1.0)).splitlines()
    assert sdf_lines[0] == "level,lambda,value,error"
    assert [line.split(",")[0] for line in sdf_lines[-6:]] == ["limsup", "liminf", "limsup+"] * 2

    assert spectra_csv([[0.0, 2.0], [0.0]]).splitlines() == [
        "level,index,eigenvalue", "1,0,0.0", "1,1,2.0", "2,0,0.0",
    ]
    assert checks_csv([CheckResult("gap", True, 0.25, "lambda* = 0.75")]).splitlines()[1] == \
        "gap,PASS,0.25,lambda* = 0.75"


def _strict_loads(text):
    def reject(constant):
        raise ValueError(f"non-standard JSON constant {constant}")
    return json.loads(text, parse_constant=reject)


def test_non_finite_values_are_written_as_null():
    results = [
        CheckResult("sandwich(lambda=2.0, k=8)", False, float("-inf"), "degree 512, n0 None, no stable level"),
        CheckResult("gap", True, 0.25),
    ]
    rows = checks_to_dict(results)
    assert rows[0]["margin"] is None
    assert rows[1]["margin"] == 0.25
    assert _strict_loads(dumps_json(rows))[0]["margin"] is None
    assert _strict_loads(dumps_json({"a": [float("nan"), (1.0, float("inf"))]})) == {"a": [None, [1.0, None]]}


@pytest.mark.asyncio
async def test_report_with_non_finite_level_values(circle):
    report = await approximate_invariants(circle.complex, 0, factorial_tower(3), "factorial",
                                          with_abelian=False)
    report.levels[0].logdet = float("-inf")
    report.levels[1].decay_margin = float("nan")
    data = _strict_loads(dumps_report(report))
    assert data["levels"][0]["logdet"] is None
    assert data["levels"][1]["decay_margin"] is None
    assert data["limit"]["window"] == 2
    assert report_from_dict(data).zero_window == 2

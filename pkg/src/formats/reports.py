import csv
import io
import json
import math
from dataclasses import asdict
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence

from ..backends.abelian import QuadratureResult
from ..engine.orchestrator import LevelRow, TowerReport
from ..errors import SchemaError
from ..spectral.bounds import CheckResult
from ..spectral.density import LimitRow, sdf_eval

LEVEL_COLUMNS = (
    "level", "name", "backend", "order", "betti", "logdet", "detclass",
    "parts_residual", "decay_margin", "smallest_positive", "largest", "error",
)


def _fraction(value: Optional[Fraction]) -> Optional[str]:
    return None if value is None else str(value)


def _finite(value: Any) -> Any:
    """JSON has no infinities or NaN: non-finite floats become null, containers are walked"""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {key: _finite(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(item) for item in value]
    return value


def dumps_json(payload: Any) -> str:
    return json.dumps(_finite(payload), indent=2, allow_nan=False)


def _level_to_dict(row: LevelRow) -> Dict[str, Any]:
    values = {column: getattr(row, column) for column in LEVEL_COLUMNS}
    values["betti"] = _fraction(row.betti)
    return values


def _quadrature(result: Optional[QuadratureResult]) -> Optional[Dict]:
    return None if result is None else asdict(result)


def report_to_dict(report: TowerReport) -> Dict[str, Any]:
    """Plain JSON form of a report; densities are left out, non-finite floats are null"""
    return _finite({
        "complex": report.complex_name,
        "dimension": report.dimension,
        "tower": report.tower_name,
        "cells": report.cells,
        "K": _fraction(report.K),
        "levels": [_level_to_dict(row) for row in report.levels],
        "limit": {
            "upper_zero": _fraction(report.upper_zero),
            "lower_zero": _fraction(report.lower_zero),
            "extrapolated": _fraction(report.extrapolated),
            "bracket": [_fraction(x) for x in report.bracket] if report.bracket else None,
            "last_step": _fraction(report.last_step),
            "window": report.zero_window,
            "determinant_verdict": report.determinant_verdict,
            "abelian_zero": _quadrature(report.abelian_zero),
            "abelian_logdet": _quadrature(report.abelian_logdet),
        },
        "limits": [asdict(row) for row in report.limits],
    })


def _parse_fraction(value: Any) -> Optional[Fraction]:
    if value is None:
        return None
    try:
        return Fraction(value)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"expected a rational, got {value!r}") from exc


def report_from_dict(data: Dict[str, Any]) -> TowerReport:
    """Inverse of report_to_dict, without densities"""
    try:
        limit = data["limit"]
        report = TowerReport(
            complex_name=data["complex"],
            dimension=int(data["dimension"]),
            tower_name=data["tower"],
            cells=int(data["cells"]),
            K=_parse_fraction(data["K"]),
        )
        for row in data["levels"]:
            values = {column: row.get(column) for column in LEVEL_COLUMNS}
            values["betti"] = _parse_fraction(values["betti"])
            report.levels.append(LevelRow(**values))
        report.upper_zero = _parse_fraction(limit["upper_zero"])
        report.lower_zero = _parse_fraction(limit["lower_zero"])
        report.extrapolated = _parse_fraction(limit["extrapolated"])
        if limit["bracket"]:
            report.bracket = tuple(_parse_fraction(x) for x in limit["bracket"])
        report.last_step = _parse_fraction(limit["last_step"])
        report.zero_window = limit.get("window")
        report.determinant_verdict = limit["determinant_verdict"]
        for key in ("abelian_zero", "abelian_logdet"):
            if limit.get(key):
                setattr(report, key, QuadratureResult(**limit[key]))
        for row in data.get("limits", []):
            row["plus_bracket"] = tuple(row["plus_bracket"])
            report.limits.append(LimitRow(**row))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"report does not match the schema: {exc}") from exc
    return report


def dumps_report(report: TowerReport) -> str:
    return dumps_json(report_to_dict(report))


def _csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if value is None else value for value in row])
    return buffer.getvalue()


def report_csv(report: TowerReport) -> str:
    """One row per level"""
    return _csv(LEVEL_COLUMNS, ([_level_to_dict(row)[c] for c in LEVEL_COLUMNS] for row in report.levels))


def sdf_csv(report: TowerReport, grid: Sequence[float]) -> str:
    """
    (level, lambda, F_n(lambda), error) rows, then limit rows with level
    'limsup', 'liminf' and 'limsup+'
    """
    rows: List[List[Any]] = []
    for row in report.levels:
        if not row.ok or row.density is None:
            continue
        for lam in grid:
            rows.append([row.level, lam, float(sdf_eval(row.density, lam)), row.density.error_at(lam)])
    for limit in report.limits:
        rows.append(["limsup", limit.lam, limit.upper, limit.last_step])
        rows.append(["liminf", limit.lam, limit.lower, limit.last_step])
        rows.append(["limsup+", limit.lam, limit.upper_plus, limit.plus_bracket[1] - limit.plus_bracket[0]])
    return _csv(("level", "lambda", "value", "error"), rows)


def quadrature_csv(grid: Sequence[float], results: Sequence[QuadratureResult]) -> str:
    """Abelian backend rows; the error column is the grid-doubling bound"""
    rows = [["abelian", lam, r.value, r.error] for lam, r in zip(grid, results)]
    return _csv(("level", "lambda", "value", "error"), rows)


def spectra_csv(spectra: Sequence[Sequence[float]]) -> str:
    """(level, index, eigenvalue) rows, levels 1-based"""
    rows = [[level, i, value] for level, values in enumerate(spectra, start=1) for i, value in enumerate(values)]
    return _csv(("level", "index", "eigenvalue"), rows)


def checks_csv(results: Sequence[CheckResult]) -> str:
    return _csv(("check", "passed", "margin", "detail"),
                ([r.name, "PASS" if r.passed else "FAIL", r.margin, r.detail] for r in results))


def checks_to_dict(results: Sequence[CheckResult]) -> List[Dict[str, Any]]:
    """A margin of -inf (a check that could not run) is written as null"""
    return _finite([asdict(r) for r in results])

import argparse
import asyncio
import json
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .backends.abelian import sdf_quadrature
from .backends.finite import enumerate_quotient, push_matrix, spectrum
from .catalog.builtin import get_example, list_examples
from .complex.cochain import EquivariantComplex, assemble_laplacian, load_complex
from .engine.checks import run_check_suite
from .engine.orchestrator import approximate_all_dimensions, approximate_invariants, level_torsion
from .errors import L2ApproxError, SchemaError
from .formats.documents import complex_to_document, read_document
from .formats.reports import (
    checks_csv, checks_to_dict, dumps_json, dumps_report, quadrature_csv, report_csv, report_to_dict,
    sdf_csv, spectra_csv,
)
from .group.quotients import QuotientSpec
from .group.words import ModelKind
from .utils.config import settings_overrides
from .utils.logger import setup_logger

EXIT_OK = 0
EXIT_LEVEL_FAILURE = 2
EXIT_INPUT_ERROR = 3

DEFAULT_GRID = "0:0.25:4"


@dataclass
class RunConfig:
    """Everything one CLI invocation needs"""
    command: str
    example: Optional[str] = None
    input: Optional[str] = None
    dimension: Optional[int] = None
    tower: Optional[str] = None
    levels: Optional[int] = None
    grid: Tuple[float, ...] = ()
    tolerance: Optional[float] = None
    format: str = "json"
    out: Optional[str] = None
    seed: int = 0
    options: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.tolerance is not None and self.tolerance <= 0:
            raise SchemaError(f"tolerance must be positive, got {self.tolerance}")
        if self.levels is not None and self.levels < 1:
            raise SchemaError(f"level cap must be >= 1, got {self.levels}")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise SchemaError("lambda grid must be strictly increasing")
        if any(x < 0 for x in self.grid):
            raise SchemaError("lambda grid must be non-negative")

    def overrides(self) -> dict:
        """Settings changed for this run only; --tol sets the gap and quadrature tolerances"""
        if self.tolerance is None:
            return {}
        return {"gap_tolerance": self.tolerance, "quadrature_tolerance": self.tolerance}


def parse_grid(text: str) -> Tuple[float, ...]:
    """'start:step:stop' (stop included) or a comma-separated list"""
    try:
        if ":" in text:
            start, step, stop = (float(x) for x in text.split(":"))
            if step <= 0:
                raise SchemaError(f"grid step must be positive in {text!r}")
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            return tuple(round(start + i * step, 12) for i in range(count))
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise SchemaError(f"invalid grid {text!r}: {exc}") from exc


def resolve_inputs(config: RunConfig) -> Tuple[EquivariantComplex, List[QuotientSpec], str]:
    """Complex, tower and tower name from --example or --input"""
    if bool(config.example) == bool(config.input):
        raise SchemaError("give exactly one of --example and --input")
    if config.example:
        example = get_example(config.example)
        name = config.tower or example.default_tower
        return example.complex, example.tower(name, config.levels), name

    try:
        C = load_complex(read_document(config.input))
    except SchemaError:
        raise
    except L2ApproxError as exc:
        raise SchemaError(f"{config.input}: {exc}") from exc
    if not C.towers:
        raise SchemaError(f"{config.input} defines no towers")
    name = config.tower or sorted(C.towers)[0]
    if name not in C.towers:
        raise SchemaError(f"{config.input} has no tower '{name}'")
    tower = list(C.towers[name])
    if config.levels is not None:
        tower = tower[:config.levels]
    return C, tower, name


def _dimension(config: RunConfig, fallback: int) -> int:
    return fallback if config.dimension is None else config.dimension


def emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, 'w') as f:
            f.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_betti(config: RunConfig) -> int:
    C, tower, name = resolve_inputs(config)
    j = _dimension(config, 1 if C.top_dimension >= 1 else 0)
    report = asyncio.run(approximate_invariants(C, j, tower, name, grid=config.grid))
    emit(dumps_report(report) if config.format == "json" else report_csv(report), config.out)
    return EXIT_LEVEL_FAILURE if report.failed_levels else EXIT_OK


def cmd_sdf(config: RunConfig) -> int:
    C, tower, name = resolve_inputs(config)
    j = _dimension(config, 0)
    grid = config.grid or parse_grid(DEFAULT_GRID)
    report = asyncio.run(approximate_invariants(C, j, tower, name, grid=grid, with_abelian=False))
    text = sdf_csv(report, grid)
    if C.model.kind is ModelKind.FREE_ABELIAN:
        laplacian = assemble_laplacian(C, j)
        results = [sdf_quadrature(laplacian, lam) for lam in grid]
        text += quadrature_csv(grid, results).split("\n", 1)[1]
    emit(text, config.out)
    return EXIT_LEVEL_FAILURE if report.failed_levels else EXIT_OK


def cmd_det(config: RunConfig) -> int:
    C, tower, name = resolve_inputs(config)
    if config.options.get("all_dims"):
        reports = asyncio.run(approximate_all_dimensions(C, tower, name))
        payload = {
            "dimensions": {str(j): report_to_dict(r) for j, r in reports.items()},
            "torsion": level_torsion(reports),
        }
        emit(dumps_json(payload), config.out)
        failed = any(r.failed_levels for r in reports.values())
        return EXIT_LEVEL_FAILURE if failed else EXIT_OK

    j = _dimension(config, 1 if C.top_dimension >= 1 else 0)
    report = asyncio.run(approximate_invariants(C, j, tower, name))
    emit(dumps_report(report) if config.format == "json" else report_csv(report), config.out)
    if report.failed_levels or report.determinant_verdict == "evidence-fail":
        return EXIT_LEVEL_FAILURE
    return EXIT_OK


def cmd_check(config: RunConfig) -> int:
    C, tower, name = resolve_inputs(config)
    j = _dimension(config, 0)
    results = asyncio.run(run_check_suite(
        C, j, tower, name,
        gap=config.options.get("gap", False),
        sandwich=not config.options.get("no_sandwich", False),
        synthetic=config.options.get("synthetic", 0),
        seed=config.seed,
        synthetic_violation=config.options.get("synthetic_violation", False),
    ))
    if config.format == "json":
        emit(dumps_json(checks_to_dict(results)), config.out)
    else:
        emit(checks_csv(results), config.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_LEVEL_FAILURE


def cmd_spectrum(config: RunConfig) -> int:
    C, tower, _ = resolve_inputs(config)
    j = _dimension(config, 0)
    laplacian = assemble_laplacian(C, j)
    spectra = []
    for q in tower:
        G = enumerate_quotient(q)
        L = push_matrix(laplacian, G, boundaries=(C.boundary(j), C.boundary(j + 1)), dimension=j)
        spectra.append(spectrum(L).tolist())
    emit(spectra_csv(spectra), config.out)
    return EXIT_OK


def cmd_examples(config: RunConfig) -> int:
    action = config.options.get("action")
    if action == "list":
        rows = list_examples()
        lines = [f"{r['name']:<8} {r['status']:<16} {r['towers']}" for r in rows]
        emit("\n".join(lines), config.out)
        return EXIT_OK
    example = get_example(config.options["name"])
    emit(json.dumps(complex_to_document(example.complex), indent=2), config.out)
    return EXIT_OK


COMMANDS = {
    "betti": cmd_betti,
    "sdf": cmd_sdf,
    "det": cmd_det,
    "check": cmd_check,
    "spectrum": cmd_spectrum,
    "examples": cmd_examples,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l2approx",
        description="Approximate L2-invariants through towers of quotients",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--example", help="built-in example name")
        p.add_argument("--input", help="complex JSON document")
        p.add_argument("-j", "--dimension", type=int, help="cell dimension")
        p.add_argument("--tower", help="tower name")
        p.add_argument("--levels", type=int, help="number of tower levels")
        p.add_argument("--grid", help="lambda grid, 'start:step:stop' or comma list")
        p.add_argument("--tol", type=float, help="gap and quadrature tolerance")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", help="output path (stdout by default)")
        p.add_argument("--seed", type=int, default=0)

    for name in ("betti", "sdf", "spectrum"):
        common(sub.add_parser(name))
    det = sub.add_parser("det")
    common(det)
    det.add_argument("--all-dims", action="store_true", help="every dimension plus torsion")
    check = sub.add_parser("check")
    common(check)
    check.add_argument("--gap", action="store_true", help="run the gap criterion")
    check.add_argument("--no-sandwich", action="store_true")
    check.add_argument("--synthetic", type=int, default=0, help="random step densities for the parts check")
    check.add_argument("--synthetic-violation", action="store_true")

    examples = sub.add_parser("examples")
    actions = examples.add_subparsers(dest="action", required=True)
    listing = actions.add_parser("list")
    listing.add_argument("--out")
    export = actions.add_parser("export")
    export.add_argument("name")
    export.add_argument("--out")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = vars(args)
    grid = parse_grid(values["grid"]) if values.get("grid") else ()
    options = {
        key: values[key]
        for key in ("all_dims", "gap", "no_sandwich", "synthetic", "synthetic_violation", "action", "name")
        if key in values
    }
    return RunConfig(
        command=args.command,
        example=values.get("example"),
        input=values.get("input"),
        dimension=values.get("dimension"),
        tower=values.get("tower"),
        levels=values.get("levels"),
        grid=grid,
        tolerance=values.get("tol"),
        format=values.get("format", "json"),
        out=values.get("out"),
        seed=values.get("seed", 0),
        options=options,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """CLI entry point; returns the exit code"""
    logger = setup_logger()
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        config.validate()
        with settings_overrides(**config.overrides()):
            return COMMANDS[config.command](config)
    except (SchemaError, FileNotFoundError, json.JSONDecodeError) as exc:
        logger.error(f"Input error: {exc}")
        return EXIT_INPUT_ERROR
    except L2ApproxError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return EXIT_LEVEL_FAILURE


if __name__ == "__main__":
    sys.exit(main())

import asyncio
from dataclasses import replace
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from ..complex.cochain import EquivariantComplex, assemble_laplacian
from ..errors import L2ApproxError
from ..group.quotients import QuotientSpec
from ..spectral.bounds import CheckResult, check_uniform_decay
from ..spectral.density import SpectralDensity, sdf_eval
from ..spectral.determinant import logdet_nonnegative_check, parts_check
from ..spectral.gap import gap_criterion
from ..spectral.sandwich import level_spectra, sandwich_trace
from ..utils.config import Settings, default_settings
from ..utils.logger import get_logger
from .orchestrator import DECAY_GRID, TowerReport, approximate_invariants, euler_check

logger = get_logger(__name__)

GAP_GRID = tuple(round(0.05 * i, 2) for i in range(1, 41))
SANDWICH_LAMBDAS = (0.5, 2.0)
SANDWICH_KS = (2, 4, 8)


def random_step_densities(count: int, seed: int = 0, a_j: int = 2, K2: float = 16.0) -> List[SpectralDensity]:
    """Synthetic step densities with rational weights summing to a_j, support in [0, K2]"""
    rng = np.random.default_rng(seed)
    densities = []
    for index in range(count):
        denominator = int(rng.integers(2, 40))
        points = np.sort(rng.uniform(1e-6, K2, size=a_j * denominator))
        kernel = int(rng.integers(0, a_j * denominator))
        jumps = [(0.0, Fraction(kernel, denominator))]
        jumps += [(float(x), Fraction(1, denominator)) for x in points[kernel:]]
        densities.append(SpectralDensity.step(jumps, normalization=a_j, label=f"synthetic-{index}"))
    return densities


def violating_density(a_j: int, at: float = 1e-6) -> SpectralDensity:
    """All mass jumps in just above zero; breaks the decay bound for any moderate K"""
    return SpectralDensity.step([(0.0, 0), (at, a_j)], normalization=a_j, label="synthetic-violation")


def full_mass_check(Fs: Sequence[SpectralDensity], a_j: int, K: Fraction) -> CheckResult:
    """F_n(K^2) == a_j exactly for every density"""
    K2 = float(K) ** 2
    misses = [F.label for F in Fs if sdf_eval(F, K2) != a_j]
    return CheckResult("full_mass", not misses, 0.0 if not misses else -1.0,
                       f"F(K^2) != {a_j} on {misses}" if misses else f"{len(Fs)} densities")


def _failure(name: str, exc: Exception) -> CheckResult:
    return CheckResult(name, False, float("-inf"), f"{type(exc).__name__}: {exc}")


def sandwich_checks(
    C: EquivariantComplex,
    j: int,
    tower: Sequence[QuotientSpec],
    lambdas: Sequence[float] = SANDWICH_LAMBDAS,
    ks: Sequence[int] = SANDWICH_KS,
    tolerance: float = 1e-10,
) -> List[CheckResult]:
    """
    One check per (lambda, k). A check passes only when some level is past
    the stabilization level and its trace matches Tr_pi there.
    """
    laplacian = assemble_laplacian(C, j)
    finite = [q for q in tower if q.is_finite]
    try:
        spectra = level_spectra(laplacian, finite)
    except L2ApproxError as exc:
        return [_failure(f"sandwich(lambda={lam}, k={k})", exc) for lam in lambdas for k in ks]
    results = []
    for lam in lambdas:
        for k in ks:
            name = f"sandwich(lambda={lam}, k={k})"
            try:
                result = sandwich_trace(laplacian, lam, k, finite, spectra=spectra)
            except L2ApproxError as exc:
                results.append(_failure(name, exc))
                continue
            detail = f"degree {result.degree}, n0 {result.n0}"
            if not result.compared:
                detail += ", no stable level"
            else:
                detail += f", max deviation {result.max_deviation():.2e}"
            results.append(CheckResult(name, result.holds(tolerance), result.margin(), detail))
    return results


async def run_check_suite(
    C: EquivariantComplex,
    j: int,
    tower: Sequence[QuotientSpec],
    tower_name: str = "",
    gap: bool = False,
    gap_grid: Sequence[float] = GAP_GRID,
    sandwich: bool = True,
    synthetic: int = 0,
    seed: int = 0,
    synthetic_violation: bool = False,
    settings: Optional[Settings] = None,
) -> List[CheckResult]:
    """
    Property suite on one complex, dimension and tower

    Covers full mass at K^2, uniform decay, the parts identity, log det'
    nonnegativity, Euler characteristics, sandwich bounds and, on request,
    the gap criterion. `synthetic` random step densities (seeded) are added
    to the parts identity check; `synthetic_violation` adds a density that
    must fail the decay check.
    """
    settings = settings or default_settings()
    report: TowerReport = await approximate_invariants(C, j, tower, tower_name, with_abelian=False,
                                                       settings=settings)
    Fs = report.densities()
    results = [
        full_mass_check(Fs, report.cells, report.K),
        check_uniform_decay(Fs, report.cells, report.K, DECAY_GRID).as_check(),
        parts_check(Fs, report.K),
        logdet_nonnegative_check(Fs),
    ]
    if synthetic:
        check = parts_check(random_step_densities(synthetic, seed), Fraction(4))
        results.append(replace(check, name="parts_identity_synthetic"))
    if synthetic_violation:
        bad = check_uniform_decay([violating_density(report.cells)], report.cells, report.K, DECAY_GRID)
        results.append(CheckResult("uniform_decay_synthetic", bad.passed, bad.worst_margin,
                                   bad.as_check().detail))
    for row in report.failed_levels:
        results.append(CheckResult(f"level {row.level}", False, float("-inf"), row.error))

    for q in tower:
        if not q.is_finite:
            continue
        try:
            results.append(await asyncio.to_thread(euler_check, C, q))
        except L2ApproxError as exc:
            results.append(_failure(f"euler({q.name})", exc))

    if sandwich and C.model.has_exact_identity:
        results.extend(await asyncio.to_thread(sandwich_checks, C, j, tower))

    if gap:
        try:
            results.append(gap_criterion(Fs, gap_grid).as_check(minimum=0.5))
        except L2ApproxError as exc:
            results.append(_failure("gap", exc))

    for result in results:
        if not result.passed:
            logger.warning(f"Check {result.name} FAILED: {result.detail}")
    return results

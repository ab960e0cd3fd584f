import asyncio
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from ..backends.abelian import QuadratureResult, fk_logdet_quadrature, sdf_quadrature
from ..backends.finite import enumerate_quotient, kernel_dim_exact, push_matrix, spectrum, step_density
from ..complex.cochain import EquivariantComplex, assemble_laplacian, euler_characteristic
from ..errors import DimensionError, L2ApproxError, QuotientError
from ..group.quotients import QuotientSpec
from ..group.words import ModelKind
from ..ring.matrix import norm_bound_K
from ..spectral.bounds import CheckResult, check_uniform_decay
from ..spectral.density import LimitRow, SpectralDensity, tail_window, tower_limits
from ..spectral.determinant import detclass_integral, fk_logdet_step, parts_identity_check, torsion_log
from ..utils.config import Settings, default_settings
from ..utils.logger import get_logger

logger = get_logger(__name__)

DECAY_GRID = (0.01, 0.1, 0.5, 0.9)


@dataclass
class LevelRow:
    """One tower level of a report; `error` is set when the level failed"""
    level: int
    name: str
    backend: str
    order: Optional[int] = None
    betti: Optional[Fraction] = None
    logdet: Optional[float] = None
    detclass: Optional[float] = None
    parts_residual: Optional[float] = None
    decay_margin: Optional[float] = None
    smallest_positive: Optional[float] = None
    largest: Optional[float] = None
    error: Optional[str] = None
    density: Optional[SpectralDensity] = field(default=None, repr=False, compare=False)

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class TowerReport:
    """
    Per-level evidence for one complex, dimension and tower, plus the
    empirical limit row

    extrapolated is F_N(0) at the last successful level and bracket is
    (F_{N-1}(0), F_N(0)); nothing beyond |F_N - F_{N-1}| is claimed.
    upper_zero and lower_zero are the sup and inf of F_n(0) over the last
    zero_window levels.
    """
    complex_name: str
    dimension: int
    tower_name: str
    cells: int
    K: Fraction
    levels: List[LevelRow] = field(default_factory=list)
    limits: List[LimitRow] = field(default_factory=list)
    upper_zero: Optional[Fraction] = None
    lower_zero: Optional[Fraction] = None
    zero_window: Optional[int] = None
    extrapolated: Optional[Fraction] = None
    bracket: Optional[Tuple[Fraction, Fraction]] = None
    last_step: Optional[Fraction] = None
    determinant_verdict: str = "no-evidence"
    abelian_zero: Optional[QuadratureResult] = None
    abelian_logdet: Optional[QuadratureResult] = None

    @property
    def failed_levels(self) -> List[LevelRow]:
        return [row for row in self.levels if not row.ok]

    def densities(self) -> List[SpectralDensity]:
        return [row.density for row in self.levels if row.ok and row.density is not None]


def _finite_level(
    C: EquivariantComplex,
    j: int,
    level: int,
    q: QuotientSpec,
    K: Fraction,
    decay_grid: Sequence[float],
) -> LevelRow:
    laplacian = assemble_laplacian(C, j)
    G = enumerate_quotient(q)
    L = push_matrix(laplacian, G, boundaries=(C.boundary(j), C.boundary(j + 1)), dimension=j)
    values = spectrum(L)
    F = step_density(L, label=q.name)
    betti = kernel_dim_exact(L)
    positive = [float(v) for v in values if v > 0]
    decay = check_uniform_decay([F], C.cells(j), K, decay_grid)
    row = LevelRow(
        level=level,
        name=q.name,
        backend="finite",
        order=G.order,
        betti=betti,
        logdet=fk_logdet_step(F),
        detclass=detclass_integral(F, K),
        parts_residual=parts_identity_check(F, K),
        decay_margin=decay.worst_margin,
        smallest_positive=min(positive) if positive else None,
        largest=float(values[-1]) if len(values) else None,
        density=F,
    )
    logger.info(f"Level {level} '{q.name}' (|G| = {G.order}): F(0) = {betti}, log det' = {row.logdet:.6g}")
    return row


def _abelian_level(C: EquivariantComplex, j: int, level: int, q: QuotientSpec) -> LevelRow:
    laplacian = assemble_laplacian(C, j)
    zero = sdf_quadrature(laplacian, 0.0)
    logdet = fk_logdet_quadrature(laplacian)
    logger.info(f"Level {level} '{q.name}' (Z^{C.model.rank}): F(0) ~ {zero.value}, log det' ~ {logdet.value:.6g}")
    return LevelRow(
        level=level,
        name=q.name,
        backend="abelian",
        betti=Fraction(zero.value).limit_denominator(10 ** 9),
        logdet=logdet.value,
    )


def run_level(
    C: EquivariantComplex,
    j: int,
    level: int,
    q: QuotientSpec,
    K: Fraction,
    decay_grid: Sequence[float] = DECAY_GRID,
) -> LevelRow:
    """
    Evaluate one level with the backend its quotient calls for

    Domain errors are captured on the row so the rest of the tower proceeds.
    """
    backend = "finite" if q.is_finite else "abelian"
    try:
        if q.is_finite:
            return _finite_level(C, j, level, q, K, decay_grid)
        if C.model.kind is not ModelKind.FREE_ABELIAN:
            raise QuotientError(f"infinite quotient '{q.name}' needs a free abelian model")
        return _abelian_level(C, j, level, q)
    except L2ApproxError as exc:
        logger.warning(f"Level {level} '{q.name}' failed: {exc}")
        return LevelRow(level=level, name=q.name, backend=backend, error=f"{type(exc).__name__}: {exc}")


def _summarize(report: TowerReport, grid: Sequence[float]) -> None:
    zeros = [row.betti for row in report.levels if row.ok and row.betti is not None]
    if zeros:
        # early levels say little about the limit; sup / inf run over the tail only
        report.zero_window = tail_window(len(zeros))
        tail = zeros[-report.zero_window:]
        report.upper_zero = max(tail)
        report.lower_zero = min(tail)
        report.extrapolated = zeros[-1]
    if len(zeros) >= 2:
        report.bracket = (zeros[-2], zeros[-1])
        report.last_step = abs(zeros[-1] - zeros[-2])

    densities = report.densities()
    if len(densities) >= 2 and grid:
        report.limits = tower_limits(densities, grid, window=tail_window(len(densities)))

    logdets = [row.logdet for row in report.levels if row.ok and row.backend == "finite"]
    if report.failed_levels or not logdets:
        report.determinant_verdict = "no-evidence" if not logdets else "partial"
    elif min(logdets) >= -1e-9:
        report.determinant_verdict = "evidence-pass"
    else:
        report.determinant_verdict = "evidence-fail"


async def approximate_invariants(
    C: EquivariantComplex,
    j: int,
    tower: Sequence[QuotientSpec],
    tower_name: str = "",
    grid: Sequence[float] = (),
    with_abelian: bool = True,
    settings: Optional[Settings] = None,
) -> TowerReport:
    """
    Run every tower level for Delta_j and assemble the report

    Levels run in worker threads, at most max_workers at a time; rows come
    back in level order. For free abelian models the limit itself is also
    evaluated on the torus when with_abelian is set.

    Returns:
        TowerReport with per-level rows and the limit estimates
    """
    settings = settings or default_settings()
    if not 0 <= j <= C.top_dimension:
        raise DimensionError(f"dimension {j} outside 0..{C.top_dimension}")
    if not tower:
        raise DimensionError("tower has no levels")
    K = norm_bound_K(assemble_laplacian(C, j))
    semaphore = asyncio.Semaphore(settings.max_workers)

    async def bounded(level: int, q: QuotientSpec) -> LevelRow:
        async with semaphore:
            return await asyncio.to_thread(run_level, C, j, level, q, K)

    logger.info(f"Approximating '{C.name}' j={j} over {len(tower)} level(s) of '{tower_name}'")
    rows = await asyncio.gather(*(bounded(n, q) for n, q in enumerate(tower, start=1)))

    report = TowerReport(C.name, j, tower_name, C.cells(j), K, levels=list(rows))
    if with_abelian and C.model.kind is ModelKind.FREE_ABELIAN:
        laplacian = assemble_laplacian(C, j)
        try:
            report.abelian_zero = await asyncio.to_thread(sdf_quadrature, laplacian, 0.0)
            report.abelian_logdet = await asyncio.to_thread(fk_logdet_quadrature, laplacian)
        except L2ApproxError as exc:
            logger.warning(f"Abelian limit for '{C.name}' j={j} failed: {exc}")
    _summarize(report, grid)
    if report.failed_levels:
        logger.warning(f"{len(report.failed_levels)} level(s) failed for '{C.name}' j={j}")
    return report


async def approximate_all_dimensions(
    C: EquivariantComplex,
    tower: Sequence[QuotientSpec],
    tower_name: str = "",
    grid: Sequence[float] = (),
    settings: Optional[Settings] = None,
) -> Dict[int, TowerReport]:
    """Reports for every dimension 0..N, in dimension order"""
    reports = {}
    for j in range(C.top_dimension + 1):
        reports[j] = await approximate_invariants(C, j, tower, tower_name, grid, settings=settings)
    return reports


def level_torsion(reports: Dict[int, TowerReport]) -> List[Optional[float]]:
    """
    Per level: 1/2 sum_j (-1)^j j log det' Delta_j, None where any
    dimension failed
    """
    count = min(len(report.levels) for report in reports.values())
    values: List[Optional[float]] = []
    for index in range(count):
        logdets = {}
        for j, report in reports.items():
            row = report.levels[index]
            logdets[j] = row.logdet if row.ok else None
        values.append(None if None in logdets.values() else torsion_log(logdets))
    return values


def euler_check(C: EquivariantComplex, q: QuotientSpec) -> CheckResult:
    """
    sum_j (-1)^j a_j == sum_j (-1)^j F^j(0) at one finite level, exactly

    Only the pushed boundary ranks are needed, no eigensolve.
    """
    G = enumerate_quotient(q)
    total = Fraction(0)
    for j in range(C.top_dimension + 1):
        laplacian = assemble_laplacian(C, j)
        L = push_matrix(laplacian, G, boundaries=(C.boundary(j), C.boundary(j + 1)), dimension=j)
        total += (-1) ** j * kernel_dim_exact(L)
    chi = euler_characteristic(C)
    return CheckResult("euler", total == chi, float(-abs(total - chi)),
                       f"chi = {chi}, alternating F(0) sum = {total} on '{q.name}'")

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

from fractions import Fraction

from ..errors import SpectralError
from ..utils.config import default_settings
from ..utils.logger import get_logger
from .density import SpectralDensity, sdf_eval

logger = get_logger(__name__)

Real = Union[float, Fraction]


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one property check, with the worst margin observed"""
    name: str
    passed: bool
    margin: float
    detail: str = ""


def decay_bound(a_j: int, K: Real, lam: float) -> float:
    """s(lambda) = a_j log(K^2) / (-log lambda), defined for 0 < lambda < 1"""
    if not 0 < lam < 1:
        raise SpectralError(f"decay bound is defined on (0, 1), got lambda = {lam}")
    if K <= 1:
        raise SpectralError(f"decay bound needs K > 1, got {K}")
    return a_j * math.log(float(K) ** 2) / (-math.log(lam))


@dataclass(frozen=True)
class DecayRow:
    level: int
    lam: float
    excess: float
    bound: float

    @property
    def margin(self) -> float:
        return self.bound - self.excess


@dataclass
class DecayReport:
    """Per level and lambda: s(lambda) - (F_n(lambda) - F_n(0))"""
    rows: List[DecayRow] = field(default_factory=list)
    tolerance: float = 0.0

    @property
    def worst_margin(self) -> float:
        return min((row.margin for row in self.rows), default=math.inf)

    @property
    def passed(self) -> bool:
        return self.worst_margin >= -self.tolerance

    def violations(self) -> List[DecayRow]:
        return [row for row in self.rows if row.margin < -self.tolerance]

    def as_check(self) -> CheckResult:
        detail = f"{len(self.violations())} violation(s) in {len(self.rows)} cases"
        return CheckResult("uniform_decay", self.passed, self.worst_margin, detail)


def _excess(F: SpectralDensity, lam: float) -> float:
    if F.zero_value is None:
        raise SpectralError(f"density '{F.label}' has no exact value at zero")
    return float(sdf_eval(F, lam) - F.zero_value)


def check_uniform_decay(
    Fs: Sequence[SpectralDensity],
    a_j: int,
    K: Real,
    grid: Sequence[float],
    tolerance: Optional[float] = None,
) -> DecayReport:
    """
    F_n(lambda) - F_n(0) <= s(lambda) at every level and every grid point

    Points of the grid outside (0, 1) are skipped; the bound says nothing
    there.
    """
    if tolerance is None:
        tolerance = default_settings().decay_tolerance
    points = [lam for lam in grid if 0 < lam < 1]
    skipped = len(grid) - len(points)
    if skipped:
        logger.debug(f"Decay check skips {skipped} grid point(s) outside (0, 1)")

    report = DecayReport(tolerance=tolerance)
    for level, F in enumerate(Fs, start=1):
        for lam in points:
            report.rows.append(DecayRow(level, lam, _excess(F, lam), decay_bound(a_j, K, lam)))
    for row in report.violations():
        logger.warning(
            f"Decay bound violated at level {row.level}, lambda {row.lam}: margin {row.margin:.3e}"
        )
    return report


def fit_decay_constant(Fs: Sequence[SpectralDensity], grid: Sequence[float]) -> float:
    """
    Smallest C with F_n(lambda) - F_n(0) <= C / (-log lambda) on the evidence

    Returns:
        the fitted C over all levels and grid points in (0, 1), 0 if none
    """
    best = 0.0
    for F in Fs:
        for lam in grid:
            if 0 < lam < 1:
                best = max(best, _excess(F, lam) * (-math.log(lam)))
    return best

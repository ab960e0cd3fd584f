from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from ..errors import SpectralError
from ..utils.config import default_settings
from ..utils.logger import get_logger
from .bounds import CheckResult
from .density import SpectralDensity, sdf_eval

logger = get_logger(__name__)


@dataclass(frozen=True)
class GapVerdict:
    """
    Result of the gap criterion on a tower

    lam_star is the largest grid point whose tail maximum of
    F_n(lambda) - F_n(0) stays within tolerance, or None (no gap seen).
    """
    lam_star: Optional[float]
    tolerance: float
    tail_excess: Tuple[Tuple[float, float], ...]

    @property
    def has_gap(self) -> bool:
        return self.lam_star is not None

    def as_check(self, minimum: float = 0.0) -> CheckResult:
        passed = self.has_gap and self.lam_star >= minimum
        margin = (self.lam_star - minimum) if self.has_gap else float("-inf")
        detail = f"gap({self.lam_star})" if self.has_gap else "no-gap"
        return CheckResult("gap", passed, margin, detail)


def gap_criterion(
    Fs: Sequence[SpectralDensity],
    grid: Sequence[float],
    tolerance: Optional[float] = None,
    window: Optional[int] = None,
) -> GapVerdict:
    """
    Spectral gap at zero iff lim F_n(lambda) - F_n(0) = 0 for some lambda > 0

    The limit is read off the last `window` levels (all by default).
    """
    if len(Fs) < 3:
        raise SpectralError(f"gap criterion needs at least 3 levels, got {len(Fs)}")
    if tolerance is None:
        tolerance = default_settings().gap_tolerance
    tail = list(Fs[-window:]) if window else list(Fs)

    excess: List[Tuple[float, float]] = []
    lam_star = None
    for lam in sorted(x for x in grid if x > 0):
        worst = 0.0
        for F in tail:
            if F.zero_value is None:
                raise SpectralError(f"density '{F.label}' has no exact value at zero")
            worst = max(worst, float(sdf_eval(F, lam) - F.zero_value))
        excess.append((lam, worst))
        if worst <= tolerance:
            lam_star = lam
        else:
            break

    if lam_star is None:
        logger.info("Gap criterion: no gap on the grid")
    else:
        logger.info(f"Gap criterion: gap up to lambda* = {lam_star}")
    return GapVerdict(lam_star, tolerance, tuple(excess))

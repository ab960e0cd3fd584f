import math
from typing import Mapping, Optional, Sequence, Union

from fractions import Fraction

from ..errors import SpectralError
from ..utils.config import default_settings
from .bounds import CheckResult
from .density import SpectralDensity, sdf_eval

Real = Union[float, Fraction]


def _require_step(F: SpectralDensity) -> None:
    if not F.is_step or F.zero_value is None:
        raise SpectralError(f"density '{F.label}' must be a step density with an exact zero value")


def detclass_integral(F: SpectralDensity, K: Real) -> float:
    """
    integral from 0+ to K^2 of (F(lambda) - F(0)) / lambda

    For a step density this is sum over 0 < lambda_i <= K^2 of w_i log(K^2 / lambda_i).
    """
    _require_step(F)
    K2 = float(K) ** 2
    total = 0.0
    for at, weight in F.positive_jumps():
        if at <= K2:
            total += float(weight) * math.log(K2 / at)
    return total


def fk_logdet_step(F: SpectralDensity) -> float:
    """log det' = sum over lambda_i > 0 of w_i log lambda_i"""
    _require_step(F)
    return sum(float(weight) * math.log(at) for at, weight in F.positive_jumps())


def parts_identity_check(F: SpectralDensity, K: Real) -> float:
    """
    |log det' - ((log K^2)(F(K^2) - F(0)) - integral (F - F(0)) / lambda)|

    Returns:
        the residual, which is zero up to rounding for densities supported
        on [0, K^2]
    """
    _require_step(F)
    K2 = float(K) ** 2
    mass = float(sdf_eval(F, K2, tolerance=0.0) - F.zero_value)
    rhs = math.log(K2) * mass - detclass_integral(F, K)
    return abs(fk_logdet_step(F) - rhs)


def parts_check(Fs: Sequence[SpectralDensity], K: Real, tolerance: Optional[float] = None) -> CheckResult:
    if tolerance is None:
        tolerance = default_settings().parts_tolerance
    residuals = [parts_identity_check(F, K) for F in Fs]
    worst = max(residuals, default=0.0)
    return CheckResult("parts_identity", worst <= tolerance, tolerance - worst,
                       f"max residual {worst:.2e} over {len(residuals)} densities")


def logdet_nonnegative_check(Fs: Sequence[SpectralDensity], tolerance: float = 1e-9) -> CheckResult:
    """log det' of an integer Laplacian is the log of a positive integer over |G|"""
    values = [fk_logdet_step(F) for F in Fs]
    worst = min(values, default=0.0)
    return CheckResult("logdet_nonnegative", worst >= -tolerance, worst,
                       f"min log det' {worst:.6g} over {len(values)} levels")


def detclass_from_logdet(a_j: int, zero_value: Real, K: Real, logdet: float) -> float:
    """Determinant-class integral recovered from log det' through integration by parts"""
    return math.log(float(K) ** 2) * (a_j - float(zero_value)) - logdet


def detclass_liminf_check(
    limit_integral: float,
    Fs: Sequence[SpectralDensity],
    K: Real,
    tolerance: float = 1e-2,
) -> CheckResult:
    """
    integral (F - F(0)) / lambda <= liminf_n of the level integrals

    limit_integral is the value for the limiting density (for example the
    abelian backend through detclass_from_logdet); the liminf is taken over
    the levels given.
    """
    levels = [detclass_integral(F, K) for F in Fs]
    if not levels:
        raise SpectralError("liminf check needs at least one level")
    liminf = min(levels[len(levels) // 2:])
    margin = liminf + tolerance - limit_integral
    return CheckResult("detclass_liminf", margin >= 0, margin,
                       f"limit {limit_integral:.6g}, tail liminf {liminf:.6g}")


def torsion_log(logdets: Mapping[int, float]) -> float:
    """1/2 sum_j (-1)^j j log det' Delta_j"""
    return 0.5 * sum((-1) ** j * j * value for j, value in logdets.items())

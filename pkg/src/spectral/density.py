from bisect import bisect_left
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import SpectralError
from ..utils.config import default_settings

Value = Union[Fraction, float]


class DensityKind(Enum):
    """How a spectral density function is represented"""
    STEP = "step"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class SpectralDensity:
    """
    Normalized counting function F(lambda) of a Laplacian

    Step densities carry jumps (lambda_i, w_i) with exact weights and are
    right-continuous: F(lambda) = sum of w_i over lambda_i <= lambda. Sampled
    densities carry (lambda, value, error) grid points from quadrature.
    """
    kind: DensityKind
    normalization: int
    jumps: Tuple[Tuple[float, Fraction], ...] = ()
    samples: Tuple[Tuple[float, float, float], ...] = ()
    zero_value: Optional[Fraction] = None
    label: str = ""

    @classmethod
    def step(
        cls,
        jumps: Iterable[Tuple[float, Union[int, Fraction]]],
        normalization: int,
        label: str = "",
        merge_tolerance: float = 0.0,
    ) -> "SpectralDensity":
        """
        Build a step density, merging jumps closer than merge_tolerance

        A jump at exactly 0 is the kernel; every other jump must sit at a
        positive lambda.
        """
        merged: List[Tuple[float, Fraction]] = []
        for at, weight in sorted((float(a), Fraction(w)) for a, w in jumps):
            if weight < 0:
                raise SpectralError(f"negative jump weight {weight} at {at}")
            if at < 0:
                raise SpectralError(f"jump at negative lambda {at}")
            if weight == 0:
                continue
            if merged and (at - merged[-1][0] <= merge_tolerance) and (at > 0) == (merged[-1][0] > 0):
                merged[-1] = (merged[-1][0], merged[-1][1] + weight)
            else:
                merged.append((at, weight))
        total = sum((w for _, w in merged), Fraction(0))
        if total > normalization:
            raise SpectralError(f"total mass {total} exceeds normalization {normalization}")
        zero = merged[0][1] if merged and merged[0][0] == 0 else Fraction(0)
        return cls(DensityKind.STEP, normalization, jumps=tuple(merged), zero_value=zero, label=label)

    @classmethod
    def sampled(
        cls,
        points: Iterable[Tuple[float, float, float]],
        normalization: int,
        label: str = "",
    ) -> "SpectralDensity":
        ordered = tuple(sorted((float(a), float(v), float(e)) for a, v, e in points))
        grid = [p[0] for p in ordered]
        if len(set(grid)) != len(grid):
            raise SpectralError("sampled density has repeated grid points")
        if any(a < 0 for a in grid):
            raise SpectralError("sampled density has negative grid points")
        return cls(DensityKind.SAMPLED, normalization, samples=ordered, label=label)

    @property
    def is_step(self) -> bool:
        return self.kind is DensityKind.STEP

    def total_mass(self) -> Value:
        if self.is_step:
            return sum((w for _, w in self.jumps), Fraction(0))
        return self.samples[-1][1] if self.samples else 0.0

    def positive_jumps(self) -> List[Tuple[float, Fraction]]:
        return [(a, w) for a, w in self.jumps if a > 0]

    def error_at(self, lam: float) -> float:
        """Error bound attached to sdf_eval at lam (zero for step densities)"""
        if self.is_step or not self.samples:
            return 0.0
        return self.samples[self._sample_index(lam)][2]

    def _sample_index(self, lam: float) -> int:
        grid = [p[0] for p in self.samples]
        index = bisect_left(grid, lam)
        return min(index, len(grid) - 1)


def sdf_eval(F: SpectralDensity, lam: float, tolerance: Optional[float] = None) -> Value:
    """
    F(lambda)

    Step kind: sum of weights with lambda_i <= lambda + tolerance, exact.
    Eigenvalues come from floating-point diagonalization, so a jump that
    sits within `tolerance` above lambda is counted: an eigenvalue that
    is 2 in exact arithmetic but computed as 2 + 1e-15 still belongs to
    F(2). The tolerance defaults to Settings.jump_tolerance, the same
    width used to merge jumps; pass 0.0 for the unsnapped count.
    Sampled kind: value at the nearest grid point at or above lambda.
    """
    if lam < 0:
        raise SpectralError(f"spectral density evaluated at negative lambda {lam}")
    if F.is_step:
        if tolerance is None:
            tolerance = default_settings().jump_tolerance
        total = Fraction(0)
        for at, weight in F.jumps:
            if at > lam + tolerance:
                break
            total += weight
        return total
    if not F.samples:
        return 0.0
    return F.samples[F._sample_index(lam)][1]


def evaluate_on_grid(F: SpectralDensity, grid: Sequence[float]) -> np.ndarray:
    return np.array([float(sdf_eval(F, lam)) for lam in grid])


@dataclass(frozen=True)
class LimitRow:
    """Tail statistics of a tower of densities at one lambda"""
    lam: float
    upper: float
    lower: float
    upper_plus: float
    lower_plus: float
    plus_bracket: Tuple[float, float]
    last_step: float


def tail_window(count: int) -> int:
    """Levels used for the empirical limsup / liminf: the later half, at least two"""
    return min(count, max(2, count - count // 2))


def tower_limits(
    Fs: Sequence[SpectralDensity],
    grid: Sequence[float],
    window: Optional[int] = None,
    plus_steps: Optional[int] = None,
) -> List[LimitRow]:
    """
    Empirical limsup / liminf of F_n over the last `window` levels

    F-bar-plus is estimated from F-bar(lambda + h), h = 2^-1 ... 2^-plus_steps;
    the values are nonincreasing as h shrinks, so the last one is the estimate
    and (last, first) is the bracket.

    Returns:
        one LimitRow per grid point, with |F_N - F_{N-1}| as last_step
    """
    if len(Fs) < 2:
        raise SpectralError("tower limits need at least two levels")
    if plus_steps is None:
        plus_steps = default_settings().plus_steps
    tail = list(Fs[-window:]) if window else list(Fs)
    steps = [2.0 ** -i for i in range(1, plus_steps + 1)]

    def tail_values(lam: float) -> np.ndarray:
        return np.array([float(sdf_eval(F, lam)) for F in tail])

    rows: List[LimitRow] = []
    for lam in grid:
        values = tail_values(lam)
        upper_shifted = [float(tail_values(lam + h).max()) for h in steps]
        lower_shifted = [float(tail_values(lam + h).min()) for h in steps]
        last_step = abs(float(sdf_eval(Fs[-1], lam)) - float(sdf_eval(Fs[-2], lam)))
        rows.append(LimitRow(
            lam=float(lam),
            upper=float(values.max()),
            lower=float(values.min()),
            upper_plus=upper_shifted[-1],
            lower_plus=lower_shifted[-1],
            plus_bracket=(upper_shifted[-1], upper_shifted[0]),
            last_step=last_step,
        ))
    return rows

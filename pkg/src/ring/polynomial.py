from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import chebyshev, polynomial as power_basis
from scipy import fft

from ..errors import DimensionError

Number = Union[int, float, Fraction]


def _strip(coefficients: Sequence[Number]) -> Tuple[Fraction, ...]:
    if len(coefficients) == 0:
        raise DimensionError("polynomial needs at least one coefficient (degree >= 0)")
    coeffs = [Fraction(c) for c in coefficients]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in mu with exact rational coefficients, lowest degree first"""
    coefficients: Tuple[Fraction, ...]

    def __init__(self, coefficients: Sequence[Number]):
        object.__setattr__(self, "coefficients", _strip(coefficients))

    @classmethod
    def constant(cls, value: Number) -> "Polynomial":
        return cls([value])

    @classmethod
    def monomial(cls, degree: int, coef: Number = 1) -> "Polynomial":
        if degree < 0:
            raise DimensionError(f"degree must be >= 0, got {degree}")
        return cls([0] * degree + [coef])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        if isinstance(x, (int, Fraction)):
            result = Fraction(0)
            for c in reversed(self.coefficients):
                result = result * x + c
            return result
        return power_basis.polyval(x, [float(c) for c in self.coefficients])

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (Fraction(0),) * (n - len(self.coefficients))
        b = other.coefficients + (Fraction(0),) * (n - len(other.coefficients))
        return Polynomial([x + y for x, y in zip(a, b)])

    def __neg__(self) -> "Polynomial":
        return Polynomial([-c for c in self.coefficients])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: Union["Polynomial", Number]) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return Polynomial([c * Fraction(other) for c in self.coefficients])
        out = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__


MU = Polynomial([0, 1])


@dataclass(frozen=True)
class ChebyshevSeries:
    """
    p(mu) = sum_k c_k T_k(2 mu / upper - 1) on the interval [0, upper]

    Coefficients are exact rationals, so evaluating the series over the group
    ring is exact even though the coefficients came from floating point
    interpolation.
    """
    coefficients: Tuple[Fraction, ...]
    upper: Fraction

    def __init__(self, coefficients: Sequence[Number], upper: Number):
        object.__setattr__(self, "coefficients", _strip(coefficients))
        object.__setattr__(self, "upper", Fraction(upper))
        if self.upper <= 0:
            raise DimensionError(f"interval upper end must be positive, got {upper}")

    @classmethod
    def interpolate(cls, func: Callable[[np.ndarray], np.ndarray], degree: int, upper: Number) -> "ChebyshevSeries":
        """
        Chebyshev interpolant of func at the degree + 1 Chebyshev points of
        the first kind on [0, upper], coefficients by a type-II DCT
        """
        n = degree + 1
        x = np.cos(np.pi * (np.arange(n) + 0.5) / n)
        values = np.asarray(func((x + 1.0) * float(upper) / 2.0), dtype=float)
        coeffs = fft.dct(values, type=2) / n
        coeffs[0] /= 2.0
        return cls([Fraction(float(c)) for c in coeffs], upper)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, mu):
        x = 2.0 * np.asarray(mu, dtype=float) / float(self.upper) - 1.0
        return chebyshev.chebval(x, [float(c) for c in self.coefficients])

    def to_polynomial(self) -> Polynomial:
        """Exact power-basis form"""
        scale = Polynomial([-1, Fraction(2) / self.upper])
        prev, cur = Polynomial([1]), scale
        total = Polynomial([0]) + prev * self.coefficients[0]
        if self.degree >= 1:
            total = total + cur * self.coefficients[1]
        for c in self.coefficients[2:]:
            prev, cur = cur, scale * cur * 2 - prev
            total = total + cur * c
        return total

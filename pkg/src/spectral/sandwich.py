"""
Polynomial sandwiches chi_[0,lambda] < p_k < f_k on [0, K^2].

f_k is 1 + 1/k up to lambda, falls linearly to 1/k at lambda + 1/k and stays
there. p_k interpolates f_k - 1/(2k), which sits 1/(2k) inside the band on
both plateaus, and is certified on a dense sample before it is used. For
every quotient the normalized trace of p_k(Delta_n) then satisfies

    F_n(lambda) <= Tr p_k(Delta_n) <= F_n(lambda + 1/k) + a_j / k

and for levels past the stabilization level it equals Tr_pi p_k(Delta).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, log2
from typing import List, Optional, Sequence

import numpy as np

from ..backends.abelian import TorusSymbol, midpoint_grid
from ..backends.finite import enumerate_quotient, push_matrix, spectrum, step_density
from ..errors import CertificationError, IdentityUndecidableError, SizeCapError
from ..group.quotients import QuotientKind, QuotientSpec
from ..group.words import ModelKind, exponent_vector
from ..ring.matrix import RingMatrix, norm_bound_K, stabilization_level, trace_element, vn_trace_pi
from ..ring.polynomial import ChebyshevSeries
from ..utils.config import Settings, default_settings
from ..utils.logger import get_logger
from .density import SpectralDensity, sdf_eval

logger = get_logger(__name__)

# largest degree evaluated exactly over the group ring
EXACT_RING_DEGREE = 16
# largest Fourier grid (points) used for traces over Z^d
FOURIER_POINTS_CAP = 1 << 24
# |Tr p_k(Delta_n) - Tr_pi p_k(Delta)| allowed on stable levels
TRACE_TOLERANCE = 1e-8


def envelope(mu: np.ndarray, lam: float, k: int) -> np.ndarray:
    """f_k"""
    mu = np.asarray(mu, dtype=float)
    ramp = 1.0 + 1.0 / k - k * (mu - lam)
    return np.clip(ramp, 1.0 / k, 1.0 + 1.0 / k)


def indicator(mu: np.ndarray, lam: float) -> np.ndarray:
    """chi_[0, lambda]"""
    mu = np.asarray(mu, dtype=float)
    return ((mu >= 0) & (mu <= lam)).astype(float)


@dataclass(frozen=True)
class SandwichCertificate:
    """Smallest gaps p - chi and f_k - p found on the sample"""
    lower_margin: float
    upper_margin: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.lower_margin > 0 and self.upper_margin > 0


def certify_sandwich(p, lam: float, k: int, upper: float, samples: Optional[int] = None) -> SandwichCertificate:
    """Check chi < p < f_k on a uniform sample of [0, upper] plus lambda and lambda + 1/k"""
    if samples is None:
        samples = default_settings().sandwich_samples
    mu = np.linspace(0.0, float(upper), samples)
    extra = [x for x in (lam, lam + 1.0 / k) if 0 <= x <= upper]
    mu = np.concatenate([mu, extra])
    values = np.asarray(p(mu), dtype=float)
    if values.ndim == 0:
        values = np.full_like(mu, float(values))
    lower = float(np.min(values - indicator(mu, lam)))
    upper_gap = float(np.min(envelope(mu, lam, k) - values))
    return SandwichCertificate(lower, upper_gap, len(mu))


def build_sandwich_polynomial(
    lam: float,
    k: int,
    upper: float,
    settings: Optional[Settings] = None,
) -> ChebyshevSeries:
    """
    Chebyshev interpolant of f_k - 1/(2k), degree doubled until certified

    Raises:
        CertificationError when the degree cap is reached first
    """
    settings = settings or default_settings()
    if k < 1:
        raise CertificationError(f"k must be >= 1, got {k}")
    if lam >= upper:
        p = ChebyshevSeries([1 + Fraction(1, 2 * k)], upper)
        return p

    degree = settings.sandwich_min_degree
    while degree <= settings.sandwich_max_degree:
        p = ChebyshevSeries.interpolate(lambda mu: envelope(mu, lam, k) - 0.5 / k, degree, upper)
        certificate = certify_sandwich(p, lam, k, upper, settings.sandwich_samples)
        if certificate.passed:
            logger.debug(f"Sandwich for lambda={lam}, k={k} certified at degree {degree}")
            return p
        logger.debug(
            f"Degree {degree} rejected: margins {certificate.lower_margin:.2e}, "
            f"{certificate.upper_margin:.2e}"
        )
        degree *= 2
    raise CertificationError(
        f"no sandwich polynomial for lambda={lam}, k={k} up to degree {settings.sandwich_max_degree}"
    )


@dataclass(frozen=True)
class SandwichLevel:
    """One tower level: its trace of p_k and the two sides of the sandwich"""
    level: int
    name: str
    trace: float
    lower: float
    upper: float
    stable: bool

    def slacks(self, trace_pi: Optional[float]) -> List[float]:
        values = [self.trace - self.lower, self.upper - self.trace]
        if self.stable and trace_pi is not None:
            values += [trace_pi - self.lower, self.upper - trace_pi]
        return values

    def deviation(self, trace_pi: Optional[float]) -> Optional[float]:
        """|Tr p_k(Delta_n) - Tr_pi p_k(Delta)|, defined on stable levels only"""
        if not self.stable or trace_pi is None:
            return None
        return abs(self.trace - trace_pi)


@dataclass
class SandwichResult:
    """
    Per-level sandwich evidence

    The result only counts as a comparison with Tr_pi when Tr_pi was
    evaluated and at least one level is past n0; otherwise holds() is False.
    """
    lam: float
    k: int
    degree: int
    trace_pi: Optional[float]
    n0: Optional[int]
    levels: List[SandwichLevel] = field(default_factory=list)

    @property
    def stable_levels(self) -> List[SandwichLevel]:
        return [level for level in self.levels if level.stable]

    @property
    def compared(self) -> bool:
        return self.trace_pi is not None and bool(self.stable_levels)

    def worst_slack(self) -> float:
        return min((s for level in self.levels for s in level.slacks(self.trace_pi)), default=0.0)

    def max_deviation(self) -> Optional[float]:
        deviations = [level.deviation(self.trace_pi) for level in self.stable_levels]
        return max((d for d in deviations if d is not None), default=None)

    def holds(self, tolerance: float = 1e-10, trace_tolerance: float = TRACE_TOLERANCE) -> bool:
        if not self.compared:
            return False
        return self.worst_slack() >= -tolerance and self.max_deviation() <= trace_tolerance

    def margin(self, trace_tolerance: float = TRACE_TOLERANCE) -> float:
        if not self.compared:
            return float("-inf")
        return min(self.worst_slack(), trace_tolerance - self.max_deviation())


@dataclass(frozen=True)
class LevelSpectrum:
    """Spectrum and step density of Delta_n at one level, shared across (lambda, k)"""
    name: str
    order: int
    values: np.ndarray
    density: SpectralDensity


def level_spectra(B: RingMatrix, tower: Sequence[QuotientSpec]) -> List[LevelSpectrum]:
    spectra = []
    for q in tower:
        G = enumerate_quotient(q)
        L = push_matrix(B, G)
        spectra.append(LevelSpectrum(q.name, G.order, spectrum(L), step_density(L)))
    return spectra


def _reach(B: RingMatrix) -> List[int]:
    """Per-coordinate max |exponent| over the support of B"""
    rank = B.model.rank
    reach = [0] * rank
    for word in B.support():
        for i, e in enumerate(exponent_vector(word, rank)):
            reach[i] = max(reach[i], abs(e))
    return reach


def _fourier_trace(B: RingMatrix, p: ChebyshevSeries, reach: List[int]) -> float:
    """
    Tr_pi p(B) for pi = Z^d as the torus mean of tr p(symbol)

    The midpoint rule with N points per axis integrates exp(i m theta)
    exactly for |m| < N, and p(symbol) only has frequencies up to
    degree * reach.
    """
    top = p.degree * max(reach, default=0)
    N = 1 << max(0, ceil(log2(top + 1)))
    if N ** B.model.rank > FOURIER_POINTS_CAP:
        raise SizeCapError(f"Fourier trace needs {N}^{B.model.rank} points")
    symbol = TorusSymbol.from_matrix(B)
    values = symbol.eigenvalues(midpoint_grid(N, B.model.rank))
    return float(np.asarray(p(values)).sum(axis=1).mean())


def _lattice_stable_from(reach: List[int], degree: int, tower: Sequence[QuotientSpec]) -> Optional[int]:
    """
    First level from which every later level is a lattice quotient with all
    moduli above degree * reach, so no non-identity word of p(B) dies there
    """
    n0 = None
    for n in range(len(tower), 0, -1):
        q = tower[n - 1]
        clean = q.kind is QuotientKind.MOD_LATTICE and all(
            m > degree * r for m, r in zip(q.moduli, reach)
        )
        if not clean:
            break
        n0 = n
    return n0


def sandwich_trace(
    B: RingMatrix,
    lam: float,
    k: int,
    tower: Sequence[QuotientSpec],
    K: Optional[Fraction] = None,
    settings: Optional[Settings] = None,
    spectra: Optional[Sequence[LevelSpectrum]] = None,
) -> SandwichResult:
    """
    Certified p_k, Tr_pi p_k(Delta), per-level traces and the stabilization level

    Small degrees are evaluated exactly over the group ring. Larger degrees
    need pi = Z^d: Tr_pi comes from the torus symbol and n0 from the lattice
    moduli, which makes it an upper bound for the exact stabilization level.
    Pass spectra from level_spectra() to reuse the level diagonalizations
    across several (lambda, k).
    """
    settings = settings or default_settings()
    if not B.model.has_exact_identity:
        raise IdentityUndecidableError("sandwich traces need a free or free abelian model")
    if K is None:
        K = norm_bound_K(B)
    upper = float(K) ** 2
    p = build_sandwich_polynomial(lam, k, upper, settings)

    if p.degree <= EXACT_RING_DEGREE:
        trace = trace_element(B, p)
        trace_pi = float(vn_trace_pi(B, p, trace=trace))
        n0 = stabilization_level(B, p, tower, trace=trace)
    elif B.model.kind is ModelKind.FREE_ABELIAN:
        reach = _reach(B)
        trace_pi = _fourier_trace(B, p, reach)
        n0 = _lattice_stable_from(reach, p.degree, tower)
    else:
        logger.warning(
            f"Degree {p.degree} sandwich over a free group: Tr_pi not evaluated, level bounds only"
        )
        trace_pi, n0 = None, None

    if spectra is None:
        spectra = level_spectra(B, tower)
    result = SandwichResult(lam, k, p.degree, trace_pi, n0)
    for n, level in enumerate(spectra, start=1):
        result.levels.append(SandwichLevel(
            level=n,
            name=level.name,
            trace=float(np.sum(p(level.values))) / level.order,
            lower=float(sdf_eval(level.density, lam)),
            upper=float(sdf_eval(level.density, lam + 1.0 / k)) + B.rows / k,
            stable=n0 is not None and n >= n0,
        ))
    logger.info(
        f"Sandwich lambda={lam}, k={k}: degree {p.degree}, Tr_pi {trace_pi}, n0 {n0}, "
        f"worst slack {result.worst_slack():.2e}, max deviation {result.max_deviation()}"
    )
    if not result.compared:
        logger.warning(f"Sandwich lambda={lam}, k={k}: no stable level, Tr_pi not compared")
    return result

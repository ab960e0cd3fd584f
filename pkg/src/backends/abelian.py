"""
Backend for pi = Z^d: Fourier symbols on the d-torus, quadrature of the
spectral density and of the log-determinant, and Dirichlet compressions to
Folner boxes.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import floor, prod
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..errors import DimensionError, ModelMismatchError, NotSelfAdjointError, SizeCapError, SpectralError
from ..group.words import ModelKind, exponent_vector
from ..ring.matrix import RingMatrix
from ..spectral.density import SpectralDensity
from ..utils.config import default_settings
from ..utils.logger import get_logger
from .exact import rank_exact

logger = get_logger(__name__)

# points per eigensolve batch
_CHUNK = 1 << 15


@dataclass(frozen=True)
class TorusSymbol:
    """
    theta -> sum over terms c.g of c exp(i <e(g), theta>), entrywise

    terms holds (row, col, exponent vector, coefficient) for every term of
    the source matrix.
    """
    dimension: int
    size: int
    terms: Tuple[Tuple[int, int, Tuple[int, ...], float], ...]

    @classmethod
    def from_matrix(cls, M: RingMatrix) -> "TorusSymbol":
        if M.model.kind is not ModelKind.FREE_ABELIAN:
            raise ModelMismatchError(
                f"torus symbols need a free abelian model, got {M.model.kind.value}"
            )
        if not M.is_square:
            raise DimensionError(f"symbol of non-square {M.rows}x{M.cols} matrix")
        if not M.self_adjoint:
            raise NotSelfAdjointError("torus symbol needs a matrix flagged self-adjoint")
        rank = M.model.rank
        terms = tuple(
            (r, c, exponent_vector(word, rank), float(coef))
            for (r, c), elem in M.entries()
            for word, coef in elem.terms
        )
        return cls(rank, M.rows, terms)

    def evaluate(self, thetas: np.ndarray) -> np.ndarray:
        """Symbols at a batch of points, shape (P, size, size)"""
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        out = np.zeros((thetas.shape[0], self.size, self.size), dtype=complex)
        for r, c, exponents, coef in self.terms:
            phase = thetas @ np.asarray(exponents, dtype=float)
            out[:, r, c] += coef * np.exp(1j * phase)
        return out

    def eigenvalues(self, thetas: np.ndarray) -> np.ndarray:
        """Ascending eigenvalues at each point, shape (P, size)"""
        blocks = []
        for start in range(0, len(thetas), _CHUNK):
            blocks.append(np.linalg.eigvalsh(self.evaluate(thetas[start:start + _CHUNK])))
        if not blocks:
            return np.zeros((0, self.size))
        return np.concatenate(blocks)


def symbol_at(M: RingMatrix, theta: Sequence[float]) -> np.ndarray:
    """Hermitian a_j x a_j symbol of M at one point of the torus"""
    symbol = TorusSymbol.from_matrix(M)
    theta = np.asarray(theta, dtype=float).reshape(1, -1)
    if theta.shape[1] != symbol.dimension:
        raise DimensionError(f"point of dimension {theta.shape[1]} on a {symbol.dimension}-torus")
    return symbol.evaluate(theta)[0]


def midpoint_grid(N: int, dimension: int) -> np.ndarray:
    """theta_k = 2 pi (k + 1/2) / N on every axis; never hits theta = 0"""
    axis = 2.0 * np.pi * (np.arange(N) + 0.5) / N
    if dimension == 0:
        return np.zeros((1, 0))
    mesh = np.meshgrid(*([axis] * dimension), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


@lru_cache(maxsize=16)
def _grid_eigenvalues(symbol: TorusSymbol, N: int) -> np.ndarray:
    logger.debug(f"Symbol eigenvalues on {N}^{symbol.dimension} grid")
    return symbol.eigenvalues(midpoint_grid(N, symbol.dimension))


def _axis_cap(dimension: int) -> int:
    settings = default_settings()
    return settings.quadrature_cap_1d if dimension <= 1 else settings.quadrature_cap_2d


@dataclass(frozen=True)
class QuadratureResult:
    """Quadrature estimate with its doubling error and grid"""
    value: float
    error: float
    grid: int
    converged: bool
    excluded_measure: float = 0.0


def _refine(estimate, symbol: TorusSymbol, N: Optional[int], tolerance: Optional[float], what: str):
    settings = default_settings()
    if tolerance is None:
        tolerance = settings.quadrature_tolerance
    cap = _axis_cap(symbol.dimension)
    fixed = N is not None
    N = N or settings.quadrature_start
    coarse = estimate(_grid_eigenvalues(symbol, N))
    while True:
        fine = estimate(_grid_eigenvalues(symbol, 2 * N))
        error = abs(fine[0] - coarse[0])
        if fixed or error <= tolerance or 4 * N > cap:
            break
        N *= 2
        coarse = fine
    converged = error <= tolerance
    if converged:
        logger.info(f"{what} converged on {2 * N}^{symbol.dimension} grid, error {error:.2e}")
    else:
        logger.warning(f"{what} not converged at grid {2 * N}: error {error:.2e} > {tolerance:.1e}")
    return fine, error, 2 * N, converged


def sdf_quadrature(
    M: RingMatrix,
    lam: float,
    N: Optional[int] = None,
    tolerance: Optional[float] = None,
) -> QuadratureResult:
    """
    F(lambda) = integral over the torus of #{eigenvalues of the symbol <= lambda}

    Grids double from N (or the configured start) until |F_N - F_2N| is below
    tolerance or the per-axis cap is reached. With an explicit N only the
    pair (N, 2N) is evaluated.
    """
    if lam < 0:
        raise SpectralError(f"spectral density evaluated at negative lambda {lam}")
    symbol = TorusSymbol.from_matrix(M)
    slack = default_settings().jump_tolerance

    def estimate(values: np.ndarray) -> Tuple[float]:
        return (float(np.count_nonzero(values <= lam + slack)) / len(values),)

    (value,), error, grid, converged = _refine(estimate, symbol, N, tolerance, f"F({lam})")
    return QuadratureResult(value, error, grid, converged)


def abelian_density(
    M: RingMatrix,
    grid: Sequence[float],
    N: Optional[int] = None,
    tolerance: Optional[float] = None,
) -> SpectralDensity:
    """Sampled spectral density on a lambda grid, each point with its error bound"""
    points = []
    for lam in grid:
        result = sdf_quadrature(M, lam, N=N, tolerance=tolerance)
        points.append((lam, result.value, result.error))
    return SpectralDensity.sampled(points, normalization=M.rows, label="abelian")


def fk_logdet_quadrature(
    M: RingMatrix,
    N: Optional[int] = None,
    tolerance: Optional[float] = None,
) -> QuadratureResult:
    """
    log det' = integral over the torus of sum of log lambda_i(theta), lambda_i > 0

    Eigenvalues below the log-singularity threshold are dropped; the share of
    dropped (point, eigenvalue) pairs is reported as excluded_measure.
    """
    symbol = TorusSymbol.from_matrix(M)
    threshold = default_settings().log_singularity

    def estimate(values: np.ndarray) -> Tuple[float, float]:
        keep = values >= threshold
        logs = np.where(keep, np.log(np.where(keep, values, 1.0)), 0.0)
        return float(logs.sum()) / len(values), float((~keep).sum()) / len(values)

    (value, excluded), error, grid, converged = _refine(estimate, symbol, N, tolerance, "log det'")
    return QuadratureResult(value, error, grid, converged, excluded)


def symbol_spectrum_grid(M: RingMatrix, N: int) -> List[Tuple[int, float, List[float]]]:
    """(theta index, theta, eigenvalues) rows for d = 1"""
    symbol = TorusSymbol.from_matrix(M)
    if symbol.dimension != 1:
        raise DimensionError(f"symbol spectrum export is for d = 1, got d = {symbol.dimension}")
    thetas = midpoint_grid(N, 1)
    values = symbol.eigenvalues(thetas)
    return [(k, float(thetas[k, 0]), values[k].tolist()) for k in range(N)]


@dataclass(frozen=True)
class FolnerBox:
    """Lambda = [0, L_1) x ... x [0, L_d) in Z^d"""
    sides: Tuple[int, ...]

    def __post_init__(self):
        if not self.sides or any(L < 1 for L in self.sides):
            raise DimensionError(f"box sides must be positive, got {self.sides}")

    @classmethod
    def cube(cls, side: int, dimension: int) -> "FolnerBox":
        return cls((side,) * dimension)

    @property
    def dimension(self) -> int:
        return len(self.sides)

    @property
    def volume(self) -> int:
        return prod(self.sides)

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*[np.arange(L) for L in self.sides], indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def _compression_entries(M: RingMatrix, box: FolnerBox):
    if M.model.kind is not ModelKind.FREE_ABELIAN:
        raise ModelMismatchError("Folner compressions need a free abelian model")
    if box.dimension != M.model.rank:
        raise DimensionError(f"{box.dimension}-dimensional box for a rank {M.model.rank} model")
    cap = default_settings().folner_cap
    size = M.rows * box.volume
    if size > cap:
        raise SizeCapError(f"compression of size {size} exceeds cap {cap}")

    points = box.points()
    sides = np.asarray(box.sides)
    n = box.volume
    entries = {}
    for (r, c), elem in M.entries():
        for word, coef in elem.terms:
            shift = np.asarray(exponent_vector(word, M.model.rank))
            # x . g on Z^d is x + e(g); keep only pairs inside the box
            targets = points + shift
            inside = np.all((targets >= 0) & (targets < sides), axis=1)
            sources = np.flatnonzero(inside)
            cols = np.ravel_multi_index(targets[inside].T, box.sides)
            for x, y in zip(sources, cols):
                key = (r * n + int(x), c * n + int(y))
                entries[key] = entries.get(key, Fraction(0)) + coef
    return size, {k: v for k, v in entries.items() if v}


def _dense(size: int, entries) -> np.ndarray:
    out = np.zeros((size, size))
    for (r, c), value in entries.items():
        out[r, c] = float(value)
    return out


def folner_compression(M: RingMatrix, box: FolnerBox) -> np.ndarray:
    """
    P_Lambda M P_Lambda with Dirichlet truncation outside the box

    Returns:
        dense symmetric matrix of size a_j |Lambda|
    """
    return _dense(*_compression_entries(M, box))


def folner_density(M: RingMatrix, box: FolnerBox) -> SpectralDensity:
    """
    Normalized eigenvalue counting of the compression, weight 1/|Lambda| each

    The kernel comes from the exact rank of the (integral) compression.
    """
    size, entries = _compression_entries(M, box)
    values = np.sort(linalg.eigvalsh(_dense(size, entries)))
    kernel_count = size - rank_exact(entries)
    values[:kernel_count] = 0.0
    weight = Fraction(1, box.volume)
    jumps = [(0.0, kernel_count * weight)] + [(float(v), weight) for v in values[kernel_count:]]
    if any(v <= 0 for v, _ in jumps[1:]):
        raise SpectralError("compression has non-positive eigenvalues outside its exact kernel")
    return SpectralDensity.step(
        jumps,
        normalization=M.rows,
        label=f"folner{box.sides}",
        merge_tolerance=default_settings().jump_tolerance,
    )


def boundary_ratio(box: FolnerBox, delta: float) -> Fraction:
    """
    |boundary_delta(Lambda)| / |Lambda| in the l1 word metric

    Counts lattice points at distance <= delta from both Lambda and its
    complement. Inside the box those are the points within floor(delta) of a
    face; outside they are the points whose excess vector has l1 norm
    1..floor(delta).
    """
    if delta < 0:
        raise DimensionError(f"delta must be non-negative, got {delta}")
    D = floor(delta)
    interior = prod(max(0, L - 2 * D) for L in box.sides)
    inside = box.volume - interior

    # per axis: L ways to have zero excess, 2 ways for each positive excess
    counts = np.array([1], dtype=np.int64)
    for L in box.sides:
        axis = np.array([L] + [2] * D, dtype=np.int64)
        counts = np.convolve(counts, axis)[:D + 1]
    outside = int(sum(counts[1:D + 1]))
    return Fraction(inside + outside, box.volume)

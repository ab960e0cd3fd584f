import math
from fractions import Fraction

import numpy as np
import pytest

from src.backends.abelian import (
    FolnerBox, abelian_density, boundary_ratio, fk_logdet_quadrature, folner_compression,
    folner_density, midpoint_grid, sdf_quadrature, symbol_at, symbol_spectrum_grid,
)
from src.complex.cochain import assemble_laplacian
from src.errors import DimensionError, ModelMismatchError, SizeCapError
from src.group.words import GroupModel
from src.ring.element import RingElement
from src.ring.matrix import RingMatrix
from src.spectral.density import sdf_eval

Z1 = GroupModel.free_abelian(1)


def circle_sdf(lam: float) -> float:
    """F(lambda) = arccos(1 - lambda/2) / pi on [0, 4]"""
    return math.acos(max(-1.0, 1.0 - lam / 2.0)) / math.pi


@pytest.fixture
def circle_delta(circle):
    return assemble_laplacian(circle.complex, 0)


def test_symbol_values(circle_delta, torus):
    assert np.allclose(symbol_at(circle_delta, [0.0]), [[0.0]])
    assert np.allclose(symbol_at(circle_delta, [math.pi]), [[4.0]])
    torus_delta = assemble_laplacian(torus.complex, 1)
    symbol = symbol_at(torus_delta, [math.pi, math.pi])
    assert np.allclose(symbol, 8.0 * np.eye(2))
    with pytest.raises(DimensionError):
        symbol_at(circle_delta, [0.0, 0.0])


def test_symbol_needs_free_abelian(wedge2):
    with pytest.raises(ModelMismatchError):
        symbol_at(assemble_laplacian(wedge2.complex, 0), [0.0, 0.0])


def test_midpoint_grid_avoids_zero():
    grid = midpoint_grid(8, 2)
    assert grid.shape == (64, 2)
    assert np.all(grid > 0)


@pytest.mark.parametrize("lam, expected", [(2.0, 0.5), (4.0, 1.0), (0.0, 0.0)])
def test_circle_sdf_quadrature(circle_delta, lam, expected):
    result = sdf_quadrature(circle_delta, lam)
    assert result.converged
    assert result.value == pytest.approx(expected, abs=1e-12)


def test_abelian_density_tracks_closed_form(circle_delta):
    grid = (0.5, 1.0, 3.0)
    F = abelian_density(circle_delta, grid, N=1024)
    for lam in grid:
        assert abs(sdf_eval(F, lam) - circle_sdf(lam)) <= 2e-3


def test_circle_logdet_vanishes(circle_delta):
    result = fk_logdet_quadrature(circle_delta)
    assert result.converged
    assert abs(result.value) <= 1e-3
    assert result.excluded_measure == 0.0


def test_mahler_measure():
    """log det of 5 - 2t - 2t^-1 = |2 - t|^2 is 2 log 2"""
    t = RingElement.from_word(Z1, Z1.generator(1))
    M = RingMatrix.from_rows(Z1, [[5 - 2 * t - 2 * t.star()]]).mark_self_adjoint()
    assert fk_logdet_quadrature(M).value == pytest.approx(math.log(4), abs=1e-3)


def test_torus_logdet_is_finite(torus):
    result = fk_logdet_quadrature(assemble_laplacian(torus.complex, 0))
    assert math.isfinite(result.value)
    assert result.value > 0


def test_symbol_spectrum_grid(circle_delta, torus):
    rows = symbol_spectrum_grid(circle_delta, 4)
    assert len(rows) == 4
    assert rows[0][2][0] == pytest.approx(2 - 2 * math.cos(math.pi / 4))
    with pytest.raises(DimensionError):
        symbol_spectrum_grid(assemble_laplacian(torus.complex, 0), 4)


def test_folner_compression_is_dirichlet_tridiagonal(circle_delta):
    matrix = folner_compression(circle_delta, FolnerBox((5,)))
    expected = 2 * np.eye(5) - np.eye(5, k=1) - np.eye(5, k=-1)
    assert np.array_equal(matrix, expected)


def test_folner_spectrum(circle_delta):
    L = 10
    F = folner_density(circle_delta, FolnerBox((L,)))
    expected = sorted(2 - 2 * math.cos(math.pi * k / (L + 1)) for k in range(1, L + 1))
    assert [at for at, _ in F.jumps if at > 0] == pytest.approx(expected)
    assert F.zero_value == 0
    assert F.total_mass() == 1


def _box_indices(inner: FolnerBox, outer: FolnerBox, rows: int) -> np.ndarray:
    """Positions of the inner box points inside the outer compression, row block by row block"""
    local = np.ravel_multi_index(inner.points().T, outer.sides)
    return np.concatenate([r * outer.volume + local for r in range(rows)])


@pytest.mark.parametrize("fixture, j, inner, outer", [
    ("circle", 0, (7,), (8,)),
    ("circle", 0, (20,), (21,)),
    ("torus", 1, (3, 3), (4, 4)),
])
def test_folner_boxes_interlace(request, fixture, j, inner, outer):
    M = assemble_laplacian(request.getfixturevalue(fixture).complex, j)
    small, large = FolnerBox(inner), FolnerBox(outer)
    A = folner_compression(M, small)
    B = folner_compression(M, large)
    index = _box_indices(small, large, M.rows)
    assert np.array_equal(B[np.ix_(index, index)], A)

    alpha = np.sort(np.linalg.eigvalsh(A))
    beta = np.sort(np.linalg.eigvalsh(B))
    m, n = len(alpha), len(beta)
    assert np.all(beta[:m] <= alpha + 1e-10)
    assert np.all(alpha <= beta[n - m:] + 1e-10)

    # counts below lambda differ by at most the number of added basis vectors
    for lam in (0.3, 1.1, 2.05, 3.7, 6.1):
        small_count = int(np.sum(alpha <= lam))
        large_count = int(np.sum(beta <= lam))
        assert large_count - (n - m) <= small_count <= large_count


@pytest.mark.parametrize("L", [50, 200])
def test_folner_convergence(circle_delta, L):
    F = folner_density(circle_delta, FolnerBox((L,)))
    for lam in (0.5, 1.0, 2.0, 3.0):
        assert abs(float(sdf_eval(F, lam)) - circle_sdf(lam)) <= 5.0 / L


def test_folner_cap(torus):
    with pytest.raises(SizeCapError):
        folner_density(assemble_laplacian(torus.complex, 1), FolnerBox.cube(100, 2))


def test_boundary_ratio():
    assert boundary_ratio(FolnerBox((100,)), 1) == Fraction(4, 100)
    assert boundary_ratio(FolnerBox((100,)), 0) == 0
    assert boundary_ratio(FolnerBox((10, 10)), 1) == Fraction(76, 100)
    ratios = [boundary_ratio(FolnerBox.cube(L, 2), 2) for L in (8, 16, 32, 64)]
    assert ratios == sorted(ratios, reverse=True)
    with pytest.raises(DimensionError):
        FolnerBox((0,))

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import linalg

from conftest import random_matrix
from src.backends.exact import rank_exact
from src.backends.finite import (
    enumerate_quotient, export_elements, kernel_dim_exact, push_block_matrix, push_matrix,
    spectrum, step_density, vn_trace_quotient,
)
from src.catalog.builtin import congruence_tower
from src.complex.cochain import assemble_laplacian
from src.errors import DimensionError, NotSelfAdjointError
from src.group.quotients import QuotientSpec, trivial_quotient
from src.group.words import GroupModel
from src.ring.element import RingElement
from src.ring.matrix import RingMatrix, norm_bound_K
from src.ring.polynomial import MU, Polynomial
from src.spectral.density import sdf_eval
from src.spectral.determinant import fk_logdet_step

F2 = GroupModel.free(2)
Z2 = GroupModel.free_abelian(2)


def circle_level(circle, n):
    C = circle.complex
    G = enumerate_quotient(QuotientSpec.lattice([n]))
    return push_matrix(assemble_laplacian(C, 1), G, boundaries=(C.boundary(1), None), dimension=1)


def test_enumeration_order_and_identity():
    G = enumerate_quotient(QuotientSpec.from_permutations([[1, 2, 3, 4, 0]]))
    assert G.order == 5
    assert G.elements[0] == (0, 1, 2, 3, 4)
    assert enumerate_quotient(trivial_quotient(2)).order == 1
    rows = export_elements(G)
    assert rows[0]["index"] == 0 and len(rows) == 5


def test_circulant_structure(circle):
    L = circle_level(circle, 4)
    matrix = L.matrix
    assert np.allclose(matrix, matrix.T)
    assert np.allclose(np.diag(matrix), 2.0)
    assert np.allclose(matrix.sum(axis=1), 0.0)
    assert np.allclose(spectrum(L), [0.0, 2.0, 2.0, 4.0])


def test_small_spectra(circle):
    assert np.allclose(spectrum(circle_level(circle, 2)), [0.0, 4.0])
    assert np.allclose(spectrum(circle_level(circle, 1)), [0.0])


def test_push_is_star_homomorphism(rng):
    """R(AB) = R(A) R(B) and R(A^*) = R(A)^T over a non-abelian quotient"""
    G = enumerate_quotient(congruence_tower(1)[0])
    for _ in range(20):
        A = random_matrix(rng, F2, 2, 3)
        B = random_matrix(rng, F2, 3, 2)
        pushed_a = push_block_matrix(A, G).dense()
        pushed_b = push_block_matrix(B, G).dense()
        assert np.array_equal(push_block_matrix(A @ B, G).dense(), pushed_a @ pushed_b)
        assert np.array_equal(push_block_matrix(A.adjoint(), G).dense(), pushed_a.T)


def test_identity_pushes_to_identity():
    G = enumerate_quotient(QuotientSpec.lattice([3, 2]))
    L = push_matrix(RingMatrix.identity(2, Z2).mark_self_adjoint(), G)
    assert np.array_equal(L.matrix, np.eye(12))


def test_push_requires_self_adjoint_square():
    G = enumerate_quotient(QuotientSpec.lattice([3, 3]))
    a = RingElement.from_word(F2, F2.generator(1))
    with pytest.raises(NotSelfAdjointError):
        push_matrix(RingMatrix.from_rows(F2, [[a]]), G)
    with pytest.raises(DimensionError):
        push_matrix(RingMatrix.zero(1, 2, F2), G)


@pytest.mark.parametrize("n", [1, 3, 7, 12])
def test_circle_kernel(circle, n):
    assert kernel_dim_exact(circle_level(circle, n)) == Fraction(1, n)


def test_zero_matrix_kernel():
    G = enumerate_quotient(QuotientSpec.lattice([4, 4]))
    L = push_matrix(RingMatrix.zero(2, 2, Z2).mark_self_adjoint(), G)
    assert kernel_dim_exact(L) == 2


def test_wedge_kernels(wedge2):
    C = wedge2.complex
    for q, order in zip(congruence_tower(3), (24, 48, 120)):
        G = enumerate_quotient(q)
        delta0 = push_matrix(assemble_laplacian(C, 0), G, boundaries=(None, C.boundary(1)))
        delta1 = push_matrix(assemble_laplacian(C, 1), G, boundaries=(C.boundary(1), None))
        assert kernel_dim_exact(delta0) == Fraction(1, order)
        assert kernel_dim_exact(delta1) == 1 + Fraction(1, order)


def test_boundary_ranks_match_laplacian_rank(wedge2):
    """rank Delta = rank d_j + rank d_{j+1} on the pushed matrices"""
    C = wedge2.complex
    G = enumerate_quotient(congruence_tower(1)[0])
    laplacian = assemble_laplacian(C, 1)
    with_boundaries = push_matrix(laplacian, G, boundaries=(C.boundary(1), None))
    direct = push_matrix(laplacian, G)
    assert kernel_dim_exact(with_boundaries) == kernel_dim_exact(direct)


def test_floating_kernel_agrees_with_exact(wedge2):
    C = wedge2.complex
    G = enumerate_quotient(congruence_tower(2)[1])
    L = push_matrix(assemble_laplacian(C, 1), G, boundaries=(C.boundary(1), None))
    values = linalg.eigvalsh(L.matrix)
    assert np.count_nonzero(np.abs(values) < 1e-6) == kernel_dim_exact(L) * G.order


def test_trace_matches_eigenvalue_sum(circle, wedge2):
    L = circle_level(circle, 5)
    laplacian = assemble_laplacian(circle.complex, 1)
    p = Polynomial.monomial(2)
    exact = vn_trace_quotient(laplacian, p, L.quotient)
    assert exact == 6
    assert math.isclose(float(np.sum(spectrum(L) ** 2)) / 5, 6.0, rel_tol=1e-12)

    laplacian = assemble_laplacian(wedge2.complex, 0)
    G = enumerate_quotient(congruence_tower(1)[0])
    values = spectrum(push_matrix(laplacian, G))
    for p in (MU, Polynomial([1, -2, 1]), Polynomial.monomial(3)):
        assert math.isclose(float(vn_trace_quotient(laplacian, p, G)), float(np.sum(p(values))) / 24,
                            rel_tol=1e-10, abs_tol=1e-10)


def test_full_mass_at_norm_bound(circle, torus, wedge2):
    for example in (circle, torus, wedge2):
        C = example.complex
        for j in range(C.top_dimension + 1):
            laplacian = assemble_laplacian(C, j)
            K = norm_bound_K(laplacian)
            for q in example.tower(levels=2):
                G = enumerate_quotient(q)
                L = push_matrix(laplacian, G, boundaries=(C.boundary(j), C.boundary(j + 1)))
                assert sdf_eval(step_density(L), float(K) ** 2) == C.cells(j)


@pytest.mark.parametrize("n", [4, 64, 256])
def test_circle_logdet(circle, n):
    """prod over k of (2 - 2cos(2 pi k / n)), k != 0, is n^2"""
    F = step_density(circle_level(circle, n))
    assert abs(fk_logdet_step(F) - 2.0 * math.log(n) / n) <= 1e-10


def test_integral_pushes_give_nonnegative_logdet(torus, bs12):
    for example in (torus, bs12):
        C = example.complex
        for j in range(C.top_dimension + 1):
            for q in example.tower(levels=2):
                G = enumerate_quotient(q)
                L = push_matrix(assemble_laplacian(C, j), G,
                                boundaries=(C.boundary(j), C.boundary(j + 1)))
                assert L.pushed.is_integral()
                assert fk_logdet_step(step_density(L)) >= -1e-9


def test_rank_exact():
    assert rank_exact(np.array([[1, 2], [2, 4]])) == 1
    assert rank_exact({(0, 0): Fraction(1, 2), (1, 1): 3, (2, 0): 1}) == 2
    assert rank_exact(np.zeros((0, 0))) == 0
    with pytest.raises(ValueError):
        rank_exact(np.array([[0.5]]))

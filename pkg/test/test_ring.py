from fractions import Fraction

import numpy as np
import pytest

from conftest import random_element, random_matrix
from src.backends.finite import enumerate_quotient, vn_trace_quotient
from src.complex.cochain import assemble_laplacian
from src.errors import DimensionError, IdentityUndecidableError, ModelMismatchError, NotSelfAdjointError
from src.group.quotients import QuotientSpec, trivial_quotient
from src.group.words import GroupModel, GroupWord
from src.ring.element import RingElement, l1_norm, ring_mul
from src.ring.matrix import (
    RingMatrix, adjoint, matrix_poly_apply, norm_bound_K, stabilization_level, vn_trace_pi,
)
from src.ring.polynomial import MU, ChebyshevSeries, Polynomial

Z1 = GroupModel.free_abelian(1)
F2 = GroupModel.free(2)


def elem(model, *terms):
    return RingElement.from_terms(model, terms)


def test_circle_product():
    """(t - 1)(t^-1 - 1) = 2 - t - t^-1"""
    t = RingElement.from_word(Z1, Z1.generator(1))
    product = ring_mul(t - 1, t.star() - 1)
    assert product == elem(Z1, ((), 2), ((1,), -1), ((-1,), -1))


def test_free_product_does_not_commute():
    a = RingElement.from_word(F2, F2.generator(1))
    b = RingElement.from_word(F2, F2.generator(2))
    ab = (a - 1) * (b - 1)
    assert ab.coefficient(GroupWord((1, 2))) == 1
    assert ab.coefficient(GroupWord((1,))) == -1
    assert ab.coefficient(GroupWord((2,))) == -1
    assert ab.identity_coefficient() == 1
    assert ab != (b - 1) * (a - 1)


def test_zero_coefficients_are_dropped():
    a = RingElement.from_word(F2, F2.generator(1))
    assert (a - a).is_zero()
    assert len(elem(F2, ((1,), 2), ((1,), -2), ((2,), 1))) == 1


def test_l1_norm_and_augmentation():
    u = elem(F2, ((1,), Fraction(3, 2)), ((2,), Fraction(-1, 2)))
    assert l1_norm(u) == 2
    assert u.augmentation() == 1


def test_mixed_models_rejected():
    with pytest.raises(ModelMismatchError):
        RingElement.one(Z1) + RingElement.one(F2)


def test_pushforward():
    u = elem(Z1, ((1, 1, 1), 2), ((), -1), ((-1, -1), 3))
    assert u.pushforward(QuotientSpec.lattice([5])) == {(3,): 5, (0,): -1}
    assert u.trivial_coefficient(trivial_quotient(1)) == 4


def test_adjoint_of_row():
    t = RingElement.from_word(Z1, Z1.generator(1))
    d1 = RingMatrix.from_rows(Z1, [[t - 1]])
    assert adjoint(d1) == RingMatrix.from_rows(Z1, [[t.star() - 1]])


def test_adjoint_involution_randomized(rng):
    for _ in range(2000):
        M = random_matrix(rng, F2, 2, 3)
        N = random_matrix(rng, F2, 3, 2)
        assert adjoint(adjoint(M)) == M
        assert adjoint(M @ N) == adjoint(N) @ adjoint(M)


def test_l1_submultiplicative(rng):
    for _ in range(2000):
        u, v = random_element(rng, F2), random_element(rng, F2)
        assert l1_norm(u * v) <= l1_norm(u) * l1_norm(v)


def test_self_adjoint_flag():
    a = RingElement.from_word(F2, F2.generator(1))
    with pytest.raises(NotSelfAdjointError):
        RingMatrix.from_rows(F2, [[a]]).mark_self_adjoint()
    assert RingMatrix.from_rows(F2, [[a + a.star()]]).mark_self_adjoint().self_adjoint


def test_norm_bound(circle, wedge2):
    assert norm_bound_K(assemble_laplacian(circle.complex, 1)) == 4
    assert norm_bound_K(assemble_laplacian(wedge2.complex, 0)) == 8
    assert norm_bound_K(assemble_laplacian(wedge2.complex, 1)) == 16
    assert norm_bound_K(RingMatrix.zero(1, 1, F2)) == 1 + Fraction(1, 2 ** 20)
    with pytest.raises(DimensionError):
        norm_bound_K(RingMatrix.zero(1, 2, F2))


def test_matrix_poly_apply(circle):
    laplacian = assemble_laplacian(circle.complex, 1)
    square = matrix_poly_apply(laplacian, Polynomial.monomial(2))
    expected = elem(Z1, ((), 6), ((1,), -4), ((-1,), -4), ((1, 1), 1), ((-1, -1), 1))
    assert square.get(0, 0) == expected


def test_vn_trace(circle, torus):
    circle_delta = assemble_laplacian(circle.complex, 1)
    assert vn_trace_pi(circle_delta, MU) == 2
    assert vn_trace_pi(circle_delta, Polynomial.monomial(2)) == 6
    assert vn_trace_pi(circle_delta, Polynomial.constant(1)) == 1
    torus_delta = assemble_laplacian(torus.complex, 1)
    assert vn_trace_pi(torus_delta, Polynomial.constant(1)) == 2


def test_vn_trace_needs_exact_identity(bs12):
    laplacian = assemble_laplacian(bs12.complex, 1)
    with pytest.raises(IdentityUndecidableError):
        vn_trace_pi(laplacian, MU)


def test_stabilization_level(circle):
    laplacian = assemble_laplacian(circle.complex, 1)
    tower = [QuotientSpec.lattice([m]) for m in range(1, 6)]
    assert stabilization_level(laplacian, MU, tower) == 2
    assert stabilization_level(laplacian, Polynomial.constant(1), tower) == 1
    assert stabilization_level(laplacian, Polynomial.monomial(2), tower) == 3
    assert stabilization_level(laplacian, MU, [QuotientSpec.lattice([1])]) is None


def test_trace_inequality_below_stabilization(circle):
    """The trivial quotient sees t and t^-1 as the identity"""
    laplacian = assemble_laplacian(circle.complex, 1)
    G = enumerate_quotient(trivial_quotient(1))
    assert vn_trace_quotient(laplacian, MU, G) == 0
    assert vn_trace_pi(laplacian, MU) == 2


@pytest.mark.parametrize("degree", [1, 2, 3])
@pytest.mark.parametrize("name", ["circle", "torus"])
def test_trace_stabilizes_exactly(name, degree, request):
    example = request.getfixturevalue(name)
    C = example.complex
    p = Polynomial.monomial(degree)
    tower = example.tower()
    for j in range(C.top_dimension + 1):
        laplacian = assemble_laplacian(C, j)
        n0 = stabilization_level(laplacian, p, tower)
        assert n0 is not None
        exact = vn_trace_pi(laplacian, p)
        for n in range(n0, len(tower) + 1):
            G = enumerate_quotient(tower[n - 1])
            assert vn_trace_quotient(laplacian, p, G) == exact


def test_chebyshev_series_matches_power_basis(circle):
    laplacian = assemble_laplacian(circle.complex, 1)
    series = ChebyshevSeries([1, Fraction(1, 2), Fraction(-1, 3), Fraction(1, 5)], 16)
    power = series.to_polynomial()
    assert matrix_poly_apply(laplacian, series) == matrix_poly_apply(laplacian, power)
    mu = np.linspace(0.0, 16.0, 33)
    assert np.allclose(series(mu), power(mu))


def test_chebyshev_interpolation_reproduces_polynomials():
    series = ChebyshevSeries.interpolate(lambda mu: mu ** 2 - 3 * mu + 1, 4, 10)
    mu = np.linspace(0.0, 10.0, 21)
    assert np.allclose(series(mu), mu ** 2 - 3 * mu + 1)

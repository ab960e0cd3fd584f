import pytest

from conftest import random_word
from src.backends.finite import enumerate_quotient
from src.catalog.builtin import dyadic_tower, factorial_tower
from src.errors import GeneratorRangeError, QuotientError
from src.group.quotients import (
    QuotientKind, QuotientSpec, check_coverage, is_trivial_in_quotient, quotient_image,
    tower_nesting_evidence, trivial_quotient,
)
from src.group.words import GroupModel, GroupWord, commutator, word_mul

F2 = GroupModel.free(2)
Z1 = GroupModel.free_abelian(1)


def test_lattice_image():
    """t^7 in Z/5 is 2"""
    q = QuotientSpec.lattice([5])
    assert quotient_image(Z1.word([1] * 7), q) == (2,)
    assert is_trivial_in_quotient(Z1.word([1] * 5), q)
    assert not is_trivial_in_quotient(Z1.generator(1), q)


def test_matrix_image():
    q = QuotientSpec.from_matrices([[[1, 2], [0, 1]], [[1, 0], [2, 1]]], 3)
    assert quotient_image(F2.word([1, 1]), q) == (1, 1, 0, 1)
    assert quotient_image(F2.word([1, -1]), q) == q.identity()


def test_permutation_action_is_on_the_right():
    """x . (gh) = (x . g) . h"""
    q = QuotientSpec.from_permutations([[1, 2, 0], [1, 0, 2]])
    image = quotient_image(F2.word([1, 2]), q)
    g, h = q.image_of_generator(1), q.image_of_generator(2)
    assert image == tuple(h[g[x]] for x in range(3))


def test_trivial_quotient():
    q = trivial_quotient(2)
    assert q.identity() == (0,)
    assert is_trivial_in_quotient(F2.word([1, 2, 2]), q)


def test_abelianization_kills_commutators():
    q = QuotientSpec.abelianization(2)
    assert not q.is_finite
    a, b = F2.generator(1), F2.generator(2)
    assert is_trivial_in_quotient(commutator(a, b, F2), q)
    assert quotient_image(F2.word([1, 2, 1]), q) == (2, 1)


def test_sl2_orders():
    for m, order in ((3, 24), (4, 48), (5, 120)):
        q = QuotientSpec.from_matrices([[[1, 1], [0, 1]], [[1, 0], [1, 1]]], m)
        assert enumerate_quotient(q).order == order


def test_invalid_specs():
    with pytest.raises(QuotientError):
        QuotientSpec.from_permutations([[0, 0, 1]])
    with pytest.raises(QuotientError):
        QuotientSpec.from_matrices([[[2, 0], [0, 1]]], 4)
    with pytest.raises(QuotientError):
        QuotientSpec.lattice([0])
    with pytest.raises(QuotientError):
        QuotientSpec("bad", QuotientKind.FINITE_IMAGES)


def test_generator_coverage():
    q = QuotientSpec.lattice([3])
    with pytest.raises(GeneratorRangeError):
        q.image_of_generator(2)
    with pytest.raises(QuotientError):
        check_coverage(q, 2)


def test_enumeration_cap():
    q = QuotientSpec.lattice([1000])
    with pytest.raises(QuotientError):
        enumerate_quotient(q, cap=10)
    with pytest.raises(QuotientError):
        enumerate_quotient(QuotientSpec.abelianization(1))


def test_nesting_evidence(rng):
    words = [Z1.word(random_word(rng, 1, 30).letters) for _ in range(200)]
    assert tower_nesting_evidence(factorial_tower(5), words) == []
    assert tower_nesting_evidence(dyadic_tower(6), words) == []
    broken = [QuotientSpec.lattice([4]), QuotientSpec.lattice([3])]
    violations = tower_nesting_evidence(broken, [Z1.word([1, 1, 1])])
    assert violations == [(1, GroupWord((1, 1, 1)))]


def test_homomorphism_property(rng):
    """image(w1 w2) = image(w1) image(w2) on 10^4 random pairs"""
    q = QuotientSpec.from_matrices([[[1, 1], [0, 1]], [[1, 0], [1, 1]]], 5)
    p = QuotientSpec.from_permutations([[1, 2, 3, 4, 0], [0, 2, 1, 4, 3]])
    for _ in range(10_000):
        w1 = F2.word(random_word(rng, 2).letters)
        w2 = F2.word(random_word(rng, 2).letters)
        product = word_mul(w1, w2, F2)
        for spec in (q, p):
            assert quotient_image(product, spec) == spec.multiply(
                quotient_image(w1, spec), quotient_image(w2, spec)
            )

import pytest

from src.backends.finite import enumerate_quotient
from src.catalog.builtin import (
    BS12_RELATOR, DOCUMENTED_ONLY, affine_quotient, get_example, list_examples, sanov_tower,
    verify_relators,
)
from src.errors import QuotientError, SchemaError
from src.group.quotients import QuotientSpec, is_trivial_in_quotient


@pytest.mark.parametrize("m, order", [(3, 6), (5, 20), (7, 21), (9, 54)])
def test_affine_quotient_orders(m, order):
    q = affine_quotient(m)
    assert is_trivial_in_quotient(BS12_RELATOR, q)
    assert enumerate_quotient(q).order == order


def test_affine_quotient_needs_odd_modulus():
    with pytest.raises(QuotientError):
        affine_quotient(4)


def test_verify_relators():
    verify_relators([BS12_RELATOR], [affine_quotient(5)])
    with pytest.raises(QuotientError):
        verify_relators([BS12_RELATOR], [QuotientSpec.from_permutations([[1, 0, 2], [0, 2, 1]])])


def test_sanov_orders():
    assert [enumerate_quotient(q).order for q in sanov_tower(3)] == [24, 120, 336]


def test_example_towers(circle, torus, wedge2, bs12):
    assert [q.name for q in circle.tower("factorial", 4)] == ["Z/1", "Z/2", "Z/6", "Z/24"]
    assert len(torus.tower()) == 4
    assert wedge2.default_tower == "congruence"
    assert [enumerate_quotient(q).order for q in bs12.tower("3adic", 2)] == [6, 54]
    assert set(circle.complex.towers) == {"cyclic", "factorial", "dyadic"}


def test_tower_errors(circle):
    with pytest.raises(SchemaError):
        circle.tower("missing")
    with pytest.raises(SchemaError):
        circle.tower("dyadic", 0)


def test_listing():
    rows = {row["name"]: row for row in list_examples()}
    assert set(rows) == {"circle", "torus", "wedge2", "bs12", "bs23"}
    assert rows["bs23"]["status"] == "documented only"
    assert rows["bs12"]["towers"] == "3adic, odd"


def test_get_example():
    assert get_example("torus").complex.cell_counts == (1, 2, 1)
    with pytest.raises(SchemaError):
        get_example("bs23")
    with pytest.raises(SchemaError):
        get_example("klein")
    assert "bs23" in DOCUMENTED_ONLY

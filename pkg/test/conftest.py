import random

import pytest

from src.catalog.builtin import example_bs12, example_circle, example_torus, example_wedge2
from src.group.words import GroupModel, GroupWord
from src.ring.element import RingElement
from src.ring.matrix import RingMatrix


@pytest.fixture(autouse=True)
def quiet_logs(monkeypatch):
    """No dated log files from tests"""
    monkeypatch.setenv("LOG_DIR", "")


@pytest.fixture(scope="session")
def circle():
    return example_circle()


@pytest.fixture(scope="session")
def torus():
    return example_torus()


@pytest.fixture(scope="session")
def wedge2():
    return example_wedge2()


@pytest.fixture(scope="session")
def bs12():
    return example_bs12()


@pytest.fixture
def rng():
    return random.Random(20240611)


def random_word(rng: random.Random, rank: int, max_length: int = 8) -> GroupWord:
    letters = [rng.choice([1, -1]) * rng.randint(1, rank) for _ in range(rng.randint(0, max_length))]
    return GroupWord(tuple(letters))


def random_element(rng: random.Random, model: GroupModel, terms: int = 3) -> RingElement:
    return RingElement.from_terms(
        model,
        [(random_word(rng, model.rank, 4).letters, rng.randint(-3, 3)) for _ in range(terms)],
    )


def random_matrix(rng: random.Random, model: GroupModel, rows: int, cols: int) -> RingMatrix:
    return RingMatrix.from_rows(
        model, [[random_element(rng, model) for _ in range(cols)] for _ in range(rows)]
    )

import string
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

from ..errors import GeneratorRangeError, IdentityUndecidableError


class ModelKind(Enum):
    """Concrete group models a complex can be defined over"""
    FREE = "free"
    FREE_ABELIAN = "free_abelian"
    PRESENTED = "presented"


@dataclass(frozen=True)
class GroupWord:
    """
    Word in signed generator indices, 1-based

    Positive letters are generators, negative letters their inverses, so
    (1, 1, -2) is a^2 b^-1. Words are always kept in the normal form of the
    model that produced them; the empty word is the identity.
    """
    letters: Tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    def is_empty(self) -> bool:
        return not self.letters

    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        return (len(self.letters), self.letters)

    def __str__(self) -> str:
        return format_word(self)


IDENTITY = GroupWord(())


@dataclass(frozen=True)
class GroupModel:
    """
    A finitely generated group pi

    free and free_abelian models decide identity exactly. A presented model
    carries its relators and the quotient specs in which questions about
    identity may be asked; words over it are only freely reduced.
    """
    kind: ModelKind
    rank: int
    relators: Tuple[GroupWord, ...] = ()
    quotients: Tuple["QuotientSpec", ...] = field(default=(), compare=False)  # noqa: F821

    def __post_init__(self):
        if self.rank < 0:
            raise GeneratorRangeError(f"rank must be non-negative, got {self.rank}")

    @classmethod
    def free(cls, rank: int) -> "GroupModel":
        return cls(ModelKind.FREE, rank)

    @classmethod
    def free_abelian(cls, rank: int) -> "GroupModel":
        return cls(ModelKind.FREE_ABELIAN, rank)

    @classmethod
    def presented(cls, rank: int, relators: Sequence[GroupWord], quotients: Sequence = ()) -> "GroupModel":
        return cls(ModelKind.PRESENTED, rank, tuple(relators), tuple(quotients))

    @property
    def has_exact_identity(self) -> bool:
        return self.kind in (ModelKind.FREE, ModelKind.FREE_ABELIAN)

    def word(self, letters: Iterable[int]) -> GroupWord:
        """Validate letters and return the word in normal form"""
        return GroupWord(normal_form(letters, self))

    def generator(self, index: int) -> GroupWord:
        return self.word((index,))

    def is_identity(self, w: GroupWord) -> bool:
        if not self.has_exact_identity:
            raise IdentityUndecidableError(
                f"{self.kind.value} model cannot decide identity; ask inside a quotient"
            )
        return w.is_empty()


def _check_letters(letters: Sequence[int], rank: int) -> None:
    for letter in letters:
        if letter == 0 or abs(letter) > rank:
            raise GeneratorRangeError(f"generator index {letter} out of range for rank {rank}")


def _free_reduce(letters: Iterable[int]) -> Tuple[int, ...]:
    stack: List[int] = []
    for letter in letters:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def exponent_vector(w: GroupWord, rank: int) -> Tuple[int, ...]:
    """Exponent sum of each generator"""
    exponents = [0] * rank
    for letter in w.letters:
        exponents[abs(letter) - 1] += 1 if letter > 0 else -1
    return tuple(exponents)


def _from_exponents(exponents: Sequence[int]) -> Tuple[int, ...]:
    letters: List[int] = []
    for index, e in enumerate(exponents, start=1):
        letters.extend([index if e > 0 else -index] * abs(e))
    return tuple(letters)


def normal_form(letters: Iterable[int], model: GroupModel) -> Tuple[int, ...]:
    """Free reduction, or sorted exponent form for free abelian models"""
    letters = tuple(letters)
    _check_letters(letters, model.rank)
    if model.kind is ModelKind.FREE_ABELIAN:
        return _from_exponents(exponent_vector(GroupWord(letters), model.rank))
    return _free_reduce(letters)


def word_mul(w1: GroupWord, w2: GroupWord, model: GroupModel) -> GroupWord:
    if model.kind is ModelKind.FREE_ABELIAN:
        _check_letters(w1.letters + w2.letters, model.rank)
        e1 = exponent_vector(w1, model.rank)
        e2 = exponent_vector(w2, model.rank)
        return GroupWord(_from_exponents([a + b for a, b in zip(e1, e2)]))
    return GroupWord(normal_form(w1.letters + w2.letters, model))


def word_inv(w: GroupWord, model: GroupModel) -> GroupWord:
    return GroupWord(normal_form((-letter for letter in reversed(w.letters)), model))


def word_power(w: GroupWord, n: int, model: GroupModel) -> GroupWord:
    base = w if n >= 0 else word_inv(w, model)
    result = IDENTITY
    for _ in range(abs(n)):
        result = word_mul(result, base, model)
    return result


def commutator(w1: GroupWord, w2: GroupWord, model: GroupModel) -> GroupWord:
    """w1 w2 w1^-1 w2^-1"""
    result = word_mul(w1, w2, model)
    result = word_mul(result, word_inv(w1, model), model)
    return word_mul(result, word_inv(w2, model), model)


def format_word(w: GroupWord) -> str:
    """a^2b^-1 style rendering; generators beyond z are written g27, g28, ..."""
    if w.is_empty():
        return "e"
    parts: List[str] = []
    i = 0
    letters = w.letters
    while i < len(letters):
        j = i
        while j < len(letters) and letters[j] == letters[i]:
            j += 1
        index = abs(letters[i])
        name = string.ascii_lowercase[index - 1] if index <= 26 else f"g{index}"
        power = (j - i) * (1 if letters[i] > 0 else -1)
        parts.append(name if power == 1 else f"{name}^{power}")
        i = j
    return "".join(parts)


def parse_word(text: str, model: Optional[GroupModel] = None) -> GroupWord:
    """Inverse of format_word for single-letter generator names"""
    text = text.replace(" ", "")
    if text in ("", "e", "1"):
        return IDENTITY
    letters: List[int] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch not in string.ascii_lowercase:
            raise GeneratorRangeError(f"invalid generator '{ch}' in {text!r}")
        index = string.ascii_lowercase.index(ch) + 1
        i += 1
        power = 1
        if i < len(text) and text[i] == "^":
            j = i + 1
            if j < len(text) and text[j] == "-":
                j += 1
            k = j
            while k < len(text) and text[k].isdigit():
                k += 1
            if k == j:
                raise GeneratorRangeError(f"invalid power in {text!r}")
            power = int(text[i + 1:k])
            i = k
        letters.extend([index if power > 0 else -index] * abs(power))
    if model is None:
        return GroupWord(_free_reduce(letters))
    return model.word(letters)

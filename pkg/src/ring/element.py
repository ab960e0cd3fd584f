from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Tuple, Union

from ..errors import ModelMismatchError
from ..group.quotients import QuotientElement, QuotientSpec, quotient_image
from ..group.words import IDENTITY, GroupModel, GroupWord, format_word, word_inv, word_mul

Scalar = Union[int, Fraction]


def _same_model(a: GroupModel, b: GroupModel) -> None:
    if a is not b and a != b:
        raise ModelMismatchError(f"cannot combine elements over {a.kind.value}({a.rank}) and {b.kind.value}({b.rank})")


class RingElement:
    """
    Finite formal sum of group words with exact rational coefficients

    No zero coefficients are stored and every key is a normal-form word of
    the model, so each word occurs at most once.
    """

    __slots__ = ("model", "_terms")

    def __init__(self, model: GroupModel, terms: Mapping[GroupWord, Scalar] = None):
        self.model = model
        clean: Dict[GroupWord, Fraction] = {}
        for word, coef in (terms or {}).items():
            word = model.word(word.letters)
            coef = Fraction(coef)
            if coef:
                total = clean.get(word, Fraction(0)) + coef
                if total:
                    clean[word] = total
                else:
                    clean.pop(word, None)
        self._terms = clean

    @classmethod
    def _raw(cls, model: GroupModel, terms: Dict[GroupWord, Fraction]) -> "RingElement":
        element = cls.__new__(cls)
        element.model = model
        element._terms = terms
        return element

    @classmethod
    def zero(cls, model: GroupModel) -> "RingElement":
        return cls._raw(model, {})

    @classmethod
    def one(cls, model: GroupModel) -> "RingElement":
        return cls._raw(model, {IDENTITY: Fraction(1)})

    @classmethod
    def scalar(cls, model: GroupModel, value: Scalar) -> "RingElement":
        value = Fraction(value)
        return cls._raw(model, {IDENTITY: value} if value else {})

    @classmethod
    def from_word(cls, model: GroupModel, word: GroupWord, coef: Scalar = 1) -> "RingElement":
        return cls(model, {word: coef})

    @classmethod
    def from_terms(cls, model: GroupModel, terms: Iterable[Tuple[Iterable[int], Scalar]]) -> "RingElement":
        """Build from (letters, coefficient) pairs; repeated words are summed"""
        total = cls.zero(model)
        for letters, coef in terms:
            total = total + cls(model, {model.word(letters): coef})
        return total

    # Views

    @property
    def terms(self) -> Tuple[Tuple[GroupWord, Fraction], ...]:
        """Terms sorted by word length, then letters"""
        return tuple(sorted(self._terms.items(), key=lambda item: item[0].sort_key()))

    def items(self) -> Iterator[Tuple[GroupWord, Fraction]]:
        return iter(self._terms.items())

    def coefficient(self, word: GroupWord) -> Fraction:
        return self._terms.get(word, Fraction(0))

    def identity_coefficient(self) -> Fraction:
        return self._terms.get(IDENTITY, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self._terms.values())

    def __len__(self) -> int:
        return len(self._terms)

    # Arithmetic

    def __add__(self, other: "RingElement") -> "RingElement":
        if not isinstance(other, RingElement):
            return self + RingElement.scalar(self.model, other)
        _same_model(self.model, other.model)
        terms = dict(self._terms)
        for word, coef in other._terms.items():
            total = terms.get(word, Fraction(0)) + coef
            if total:
                terms[word] = total
            else:
                terms.pop(word, None)
        return RingElement._raw(self.model, terms)

    __radd__ = __add__

    def __neg__(self) -> "RingElement":
        return RingElement._raw(self.model, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other: "RingElement") -> "RingElement":
        if not isinstance(other, RingElement):
            other = RingElement.scalar(self.model, other)
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "RingElement":
        return RingElement.scalar(self.model, other) - self

    def scale(self, value: Scalar) -> "RingElement":
        value = Fraction(value)
        if not value:
            return RingElement.zero(self.model)
        return RingElement._raw(self.model, {w: c * value for w, c in self._terms.items()})

    def __mul__(self, other: Union["RingElement", Scalar]) -> "RingElement":
        if isinstance(other, RingElement):
            return ring_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other: Scalar) -> "RingElement":
        return self.scale(other)

    def star(self) -> "RingElement":
        """Involution sum c_g g -> sum conj(c_g) g^-1 (coefficients are real)"""
        return RingElement._raw(
            self.model, {word_inv(w, self.model): c for w, c in self._terms.items()}
        )

    def l1_norm(self) -> Fraction:
        return sum((abs(c) for c in self._terms.values()), Fraction(0))

    def augmentation(self) -> Fraction:
        return sum(self._terms.values(), Fraction(0))

    def pushforward(self, q: QuotientSpec) -> Dict[QuotientElement, Fraction]:
        """Coefficients collected by image in the quotient, zeros dropped"""
        collected: Dict[QuotientElement, Fraction] = {}
        for word, coef in self._terms.items():
            image = quotient_image(word, q)
            collected[image] = collected.get(image, Fraction(0)) + coef
        return {image: coef for image, coef in collected.items() if coef}

    def trivial_coefficient(self, q: QuotientSpec) -> Fraction:
        """Sum of coefficients of words whose image in q is the identity"""
        identity = q.identity()
        return sum(
            (c for w, c in self._terms.items() if quotient_image(w, q) == identity),
            Fraction(0),
        )

    # Comparison and display

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RingElement):
            return self.model == other.model and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == RingElement.scalar(self.model, other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        return f"RingElement({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for word, coef in self.terms:
            sign = "-" if coef < 0 else "+"
            mag = abs(coef)
            if word.is_empty():
                body = str(mag)
            elif mag == 1:
                body = format_word(word)
            else:
                body = f"{mag}*{format_word(word)}"
            parts.append(f"{sign} {body}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def ring_mul(u: RingElement, v: RingElement) -> RingElement:
    """Convolution product (u.v)_w = sum over g.h = w of u_g v_h"""
    _same_model(u.model, v.model)
    model = u.model
    terms: Dict[GroupWord, Fraction] = {}
    for g, a in u._terms.items():
        for h, b in v._terms.items():
            w = word_mul(g, h, model)
            total = terms.get(w, Fraction(0)) + a * b
            if total:
                terms[w] = total
            else:
                terms.pop(w, None)
    return RingElement._raw(model, terms)


def l1_norm(u: RingElement) -> Fraction:
    return u.l1_norm()

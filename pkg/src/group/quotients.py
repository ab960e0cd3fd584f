from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy import Matrix

from ..errors import GeneratorRangeError, QuotientError
from .words import GroupWord

QuotientElement = Tuple[int, ...]


class QuotientKind(Enum):
    """How a quotient map pi -> pi/Gamma is realized"""
    FINITE_IMAGES = "finite_images"
    MOD_LATTICE = "mod_lattice"
    FREE_ABELIANIZATION = "free_abelianization"


@dataclass(frozen=True)
class QuotientSpec:
    """
    A homomorphism from pi given by generator images

    Elements of the target are hashable canonical tuples: permutation arrays
    (x -> p[x], 0-based), row-major residue matrices, residue vectors, or
    integer exponent vectors. Products compose left to right, so the image of
    a word is the product of its letters' images in reading order and
    permutations act on the right: x.(gh) = (x.g).h.
    """
    name: str
    kind: QuotientKind
    permutations: Tuple[Tuple[int, ...], ...] = ()
    matrices: Tuple[Tuple[Tuple[int, ...], ...], ...] = ()
    modulus: int = 0
    moduli: Tuple[int, ...] = ()
    exponents: Tuple[Tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.kind is QuotientKind.FINITE_IMAGES:
            if bool(self.permutations) == bool(self.matrices):
                raise QuotientError(
                    f"quotient '{self.name}' needs either permutation or matrix images"
                )
            if self.permutations:
                self._validate_permutations()
            else:
                self._validate_matrices()
        elif self.kind is QuotientKind.MOD_LATTICE:
            if not self.moduli or any(m < 1 for m in self.moduli):
                raise QuotientError(f"quotient '{self.name}' needs positive moduli")
        elif self.kind is QuotientKind.FREE_ABELIANIZATION:
            if not self.exponents or len({len(row) for row in self.exponents}) != 1:
                raise QuotientError(f"quotient '{self.name}' needs a rectangular exponent matrix")

    def _validate_permutations(self) -> None:
        degree = len(self.permutations[0])
        for perm in self.permutations:
            if len(perm) != degree or sorted(perm) != list(range(degree)):
                raise QuotientError(f"quotient '{self.name}': {perm} is not a permutation of {degree} points")

    def _validate_matrices(self) -> None:
        if self.modulus < 1:
            raise QuotientError(f"quotient '{self.name}' needs a positive modulus")
        size = len(self.matrices[0])
        for mat in self.matrices:
            if len(mat) != size or any(len(row) != size for row in mat):
                raise QuotientError(f"quotient '{self.name}': matrix images must be {size}x{size}")
        # inverses are built eagerly so a singular image fails here
        _ = self._inverse_images

    # Constructors

    @classmethod
    def from_permutations(cls, images: Sequence[Sequence[int]], name: str = "perm") -> "QuotientSpec":
        return cls(name, QuotientKind.FINITE_IMAGES, permutations=tuple(tuple(p) for p in images))

    @classmethod
    def from_matrices(cls, images: Sequence, modulus: int, name: str = "matrix") -> "QuotientSpec":
        mats = tuple(tuple(tuple(int(x) % modulus for x in row) for row in mat) for mat in images)
        return cls(name, QuotientKind.FINITE_IMAGES, matrices=mats, modulus=modulus)

    @classmethod
    def lattice(cls, moduli: Sequence[int], name: Optional[str] = None) -> "QuotientSpec":
        moduli = tuple(int(m) for m in moduli)
        label = name or "Z/" + "xZ/".join(str(m) for m in moduli)
        return cls(label, QuotientKind.MOD_LATTICE, moduli=moduli)

    @classmethod
    def abelianization(cls, rank: int, exponents: Optional[Sequence[Sequence[int]]] = None,
                       name: str = "abelianization") -> "QuotientSpec":
        if exponents is None:
            exponents = [[1 if i == j else 0 for j in range(rank)] for i in range(rank)]
        return cls(name, QuotientKind.FREE_ABELIANIZATION,
                   exponents=tuple(tuple(int(x) for x in row) for row in exponents))

    # Structure

    @property
    def rank(self) -> int:
        """Number of generators this spec gives images for"""
        if self.kind is QuotientKind.FINITE_IMAGES:
            return len(self.permutations or self.matrices)
        if self.kind is QuotientKind.MOD_LATTICE:
            return len(self.moduli)
        return len(self.exponents[0])

    @property
    def is_finite(self) -> bool:
        return self.kind is not QuotientKind.FREE_ABELIANIZATION

    def identity(self) -> QuotientElement:
        if self.kind is QuotientKind.FINITE_IMAGES:
            if self.permutations:
                return tuple(range(len(self.permutations[0])))
            size = len(self.matrices[0])
            return tuple(1 if i == j else 0 for i in range(size) for j in range(size))
        if self.kind is QuotientKind.MOD_LATTICE:
            return (0,) * len(self.moduli)
        return (0,) * len(self.exponents)

    def multiply(self, x: QuotientElement, y: QuotientElement) -> QuotientElement:
        if self.kind is QuotientKind.FINITE_IMAGES:
            if self.permutations:
                return tuple(y[i] for i in x)
            return _matmul_mod(x, y, len(self.matrices[0]), self.modulus)
        if self.kind is QuotientKind.MOD_LATTICE:
            return tuple((a + b) % m for a, b, m in zip(x, y, self.moduli))
        return tuple(a + b for a, b in zip(x, y))

    @cached_property
    def _images(self) -> Tuple[QuotientElement, ...]:
        if self.kind is QuotientKind.FINITE_IMAGES:
            if self.permutations:
                return self.permutations
            return tuple(tuple(x for row in mat for x in row) for mat in self.matrices)
        if self.kind is QuotientKind.MOD_LATTICE:
            d = len(self.moduli)
            return tuple(
                tuple((1 if i == j else 0) % self.moduli[i] for i in range(d)) for j in range(d)
            )
        return tuple(tuple(row[j] for row in self.exponents) for j in range(self.rank))

    @cached_property
    def _inverse_images(self) -> Tuple[QuotientElement, ...]:
        if self.kind is QuotientKind.FINITE_IMAGES:
            if self.permutations:
                inverses = []
                for perm in self.permutations:
                    inv = [0] * len(perm)
                    for x, y in enumerate(perm):
                        inv[y] = x
                    inverses.append(tuple(inv))
                return tuple(inverses)
            inverses = []
            for mat in self.matrices:
                try:
                    inv = Matrix(mat).inv_mod(self.modulus)
                except ValueError as exc:
                    raise QuotientError(
                        f"quotient '{self.name}': image {mat} is not invertible mod {self.modulus}"
                    ) from exc
                inverses.append(tuple(int(x) % self.modulus for x in inv))
            return tuple(inverses)
        if self.kind is QuotientKind.MOD_LATTICE:
            return tuple(
                tuple((-x) % m for x, m in zip(image, self.moduli)) for image in self._images
            )
        return tuple(tuple(-x for x in image) for image in self._images)

    def image_of_generator(self, letter: int) -> QuotientElement:
        index = abs(letter)
        if letter == 0 or index > self.rank:
            raise GeneratorRangeError(
                f"quotient '{self.name}' has images for {self.rank} generators, got letter {letter}"
            )
        return self._images[index - 1] if letter > 0 else self._inverse_images[index - 1]


def _matmul_mod(x: QuotientElement, y: QuotientElement, size: int, modulus: int) -> QuotientElement:
    out: List[int] = []
    for i in range(size):
        row = x[i * size:(i + 1) * size]
        for j in range(size):
            out.append(sum(row[k] * y[k * size + j] for k in range(size)) % modulus)
    return tuple(out)


def trivial_quotient(rank: int, name: str = "trivial") -> QuotientSpec:
    """Every generator maps to the identity of the one-element group"""
    return QuotientSpec.from_permutations([(0,)] * rank, name=name)


def quotient_image(w: GroupWord, q: QuotientSpec) -> QuotientElement:
    """Homomorphic image of a word: product of its letters' images"""
    result = q.identity()
    for letter in w.letters:
        result = q.multiply(result, q.image_of_generator(letter))
    return result


def is_trivial_in_quotient(w: GroupWord, q: QuotientSpec) -> bool:
    return quotient_image(w, q) == q.identity()


def check_coverage(q: QuotientSpec, rank: int) -> None:
    if q.rank != rank:
        raise QuotientError(f"quotient '{q.name}' covers {q.rank} generators, model has {rank}")


def tower_nesting_evidence(tower: Sequence[QuotientSpec], words: Iterable[GroupWord]) -> List[Tuple[int, GroupWord]]:
    """
    Sampled check of Gamma_{n+1} <= Gamma_n

    Returns (level index, word) pairs where a word dies at level n+1 but
    survives at level n. An empty list is evidence of nesting, not proof.
    """
    violations: List[Tuple[int, GroupWord]] = []
    words = list(words)
    trivial: Dict[int, List[bool]] = {
        n: [is_trivial_in_quotient(w, q) for w in words] for n, q in enumerate(tower)
    }
    for n in range(len(tower) - 1):
        for w, here, below in zip(words, trivial[n], trivial[n + 1]):
            if below and not here:
                violations.append((n + 1, w))
    return violations

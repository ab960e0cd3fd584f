from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from ..errors import DimensionError, IdentityUndecidableError, NotSelfAdjointError
from ..group.quotients import QuotientSpec, is_trivial_in_quotient
from ..group.words import GroupModel, GroupWord
from ..utils.config import default_settings
from ..utils.logger import get_logger
from .element import RingElement, Scalar, _same_model
from .polynomial import ChebyshevSeries, Polynomial

logger = get_logger(__name__)

Index = Tuple[int, int]
AnyPolynomial = Union[Polynomial, ChebyshevSeries]


class RingMatrix:
    """
    Sparse rows x cols matrix over the group ring of a model

    Only nonzero entries are stored. `self_adjoint` is set only through
    `mark_self_adjoint`, which verifies M == adjoint(M) exactly.
    """

    __slots__ = ("rows", "cols", "model", "_entries", "self_adjoint")

    def __init__(
        self,
        rows: int,
        cols: int,
        model: GroupModel,
        entries: Optional[Mapping[Index, RingElement]] = None,
    ):
        if rows < 0 or cols < 0:
            raise DimensionError(f"invalid shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self.model = model
        self.self_adjoint = False
        self._entries: Dict[Index, RingElement] = {}
        for (r, c), elem in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise DimensionError(f"entry ({r}, {c}) outside {rows}x{cols}")
            _same_model(model, elem.model)
            if not elem.is_zero():
                self._entries[(r, c)] = elem

    @classmethod
    def zero(cls, rows: int, cols: int, model: GroupModel) -> "RingMatrix":
        return cls(rows, cols, model)

    @classmethod
    def identity(cls, size: int, model: GroupModel) -> "RingMatrix":
        return cls(size, size, model, {(i, i): RingElement.one(model) for i in range(size)})

    @classmethod
    def from_rows(cls, model: GroupModel, rows: Sequence[Sequence[Union[RingElement, Scalar]]]) -> "RingMatrix":
        n_rows = len(rows)
        n_cols = len(rows[0]) if rows else 0
        entries: Dict[Index, RingElement] = {}
        for r, row in enumerate(rows):
            if len(row) != n_cols:
                raise DimensionError("ragged rows")
            for c, value in enumerate(row):
                if not isinstance(value, RingElement):
                    value = RingElement.scalar(model, value)
                entries[(r, c)] = value
        return cls(n_rows, n_cols, model, entries)

    # Access

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def get(self, r: int, c: int) -> RingElement:
        return self._entries.get((r, c)) or RingElement.zero(self.model)

    def entries(self) -> Iterator[Tuple[Index, RingElement]]:
        """Nonzero entries in row-major order"""
        for key in sorted(self._entries):
            yield key, self._entries[key]

    def is_integral(self) -> bool:
        return all(e.is_integral() for e in self._entries.values())

    def support(self) -> List[GroupWord]:
        words = {w for e in self._entries.values() for w, _ in e.items()}
        return sorted(words, key=GroupWord.sort_key)

    # Arithmetic

    def __add__(self, other: "RingMatrix") -> "RingMatrix":
        self._check_same_shape(other)
        entries = dict(self._entries)
        for key, elem in other._entries.items():
            entries[key] = entries[key] + elem if key in entries else elem
        return RingMatrix(self.rows, self.cols, self.model, entries)

    def __neg__(self) -> "RingMatrix":
        return self.scale(-1)

    def __sub__(self, other: "RingMatrix") -> "RingMatrix":
        return self + (-other)

    def scale(self, value: Scalar) -> "RingMatrix":
        return RingMatrix(self.rows, self.cols, self.model,
                          {k: e.scale(value) for k, e in self._entries.items()})

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        _same_model(self.model, other.model)
        by_row: Dict[int, List[Tuple[int, RingElement]]] = {}
        for (k, j), elem in other._entries.items():
            by_row.setdefault(k, []).append((j, elem))
        entries: Dict[Index, RingElement] = {}
        for (i, k), left in self._entries.items():
            for j, right in by_row.get(k, ()):
                product = left * right
                entries[(i, j)] = entries[(i, j)] + product if (i, j) in entries else product
        return RingMatrix(self.rows, other.cols, self.model, entries)

    __mul__ = __matmul__

    def adjoint(self) -> "RingMatrix":
        result = RingMatrix(self.cols, self.rows, self.model,
                            {(c, r): e.star() for (r, c), e in self._entries.items()})
        result.self_adjoint = self.self_adjoint
        return result

    def mark_self_adjoint(self) -> "RingMatrix":
        if not self.is_square or self != self.adjoint():
            raise NotSelfAdjointError("matrix differs from its adjoint")
        self.self_adjoint = True
        return self

    def trace_element(self) -> RingElement:
        if not self.is_square:
            raise DimensionError(f"trace of non-square {self.rows}x{self.cols} matrix")
        total = RingElement.zero(self.model)
        for i in range(self.rows):
            total = total + self.get(i, i)
        return total

    def _check_same_shape(self, other: "RingMatrix") -> None:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        _same_model(self.model, other.model)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RingMatrix):
            return NotImplemented
        return (self.shape == other.shape and self.model == other.model
                and self._entries == other._entries)

    def __hash__(self) -> int:
        return hash((self.shape, frozenset(self._entries.items())))

    def __repr__(self) -> str:
        body = "; ".join(f"({r},{c}): {e}" for (r, c), e in self.entries())
        return f"RingMatrix({self.rows}x{self.cols}, {body})"


def adjoint(M: RingMatrix) -> RingMatrix:
    """Transpose with each term c.g replaced by conj(c).g^-1"""
    return M.adjoint()


def norm_bound_K(B: RingMatrix, epsilon: Optional[Fraction] = None) -> Fraction:
    """
    K with K >= a * sum_j max_i |B_ij|_1 and K > 1

    K^2 bounds the operator norm of B over pi and over every quotient.
    """
    if not B.is_square:
        raise DimensionError("norm bound needs a square matrix")
    if epsilon is None:
        epsilon = Fraction(default_settings().k_epsilon)
    column_max = [Fraction(0)] * B.cols
    for (_, c), elem in B.entries():
        column_max[c] = max(column_max[c], elem.l1_norm())
    bound = B.rows * sum(column_max, Fraction(0))
    return max(1 + Fraction(epsilon), bound)


def _apply_horner(B: RingMatrix, p: Polynomial) -> RingMatrix:
    identity = RingMatrix.identity(B.rows, B.model)
    result = identity.scale(p.coefficients[-1])
    for c in reversed(p.coefficients[:-1]):
        result = result @ B + identity.scale(c)
    return result


def _apply_chebyshev(B: RingMatrix, p: ChebyshevSeries) -> RingMatrix:
    identity = RingMatrix.identity(B.rows, B.model)
    X = B.scale(Fraction(2) / p.upper) - identity
    prev, cur = identity, X
    result = identity.scale(p.coefficients[0])
    if p.degree >= 1:
        result = result + X.scale(p.coefficients[1])
    for k, c in enumerate(p.coefficients[2:], start=2):
        prev, cur = cur, (X @ cur).scale(2) - prev
        result = result + cur.scale(c)
        if k % 64 == 0:
            logger.debug(f"Chebyshev recurrence at degree {k}/{p.degree}")
    return result


def matrix_poly_apply(B: RingMatrix, p: AnyPolynomial) -> RingMatrix:
    """p(B) over the group ring, exactly"""
    if not B.is_square:
        raise DimensionError("polynomial of a non-square matrix")
    if isinstance(p, ChebyshevSeries):
        result = _apply_chebyshev(B, p)
    else:
        result = _apply_horner(B, p)
    result.self_adjoint = B.self_adjoint
    return result


def trace_element(B: RingMatrix, p: AnyPolynomial) -> RingElement:
    """sum_j p(B)_jj"""
    return matrix_poly_apply(B, p).trace_element()


def vn_trace_pi(B: RingMatrix, p: AnyPolynomial, trace: Optional[RingElement] = None) -> Fraction:
    """Tr_pi p(B): coefficient of the identity in the diagonal sum of p(B)"""
    if not B.model.has_exact_identity:
        raise IdentityUndecidableError(
            "von Neumann trace over pi needs a free or free abelian model"
        )
    if trace is None:
        trace = trace_element(B, p)
    return trace.identity_coefficient()


def stabilization_level(
    B: RingMatrix,
    p: AnyPolynomial,
    tower: Sequence[QuotientSpec],
    trace: Optional[RingElement] = None,
) -> Optional[int]:
    """
    Smallest 1-based level n0 such that, at n0 and every later level of the
    tower, no non-identity word of sum_j p(B)_jj has trivial image

    Returns None when the last level still kills one of the words.
    """
    if not tower:
        raise DimensionError("stabilization level needs a nonempty tower")
    if not B.model.has_exact_identity:
        raise IdentityUndecidableError("stabilization level needs exact identity testing in pi")
    if trace is None:
        trace = trace_element(B, p)
    words = [w for w, _ in trace.items() if not w.is_empty()]
    n0: Optional[int] = None
    for n in range(len(tower), 0, -1):
        if any(is_trivial_in_quotient(w, tower[n - 1]) for w in words):
            break
        n0 = n
    return n0

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import linalg

from ..errors import DimensionError, NotSelfAdjointError, QuotientError, SizeCapError, SpectralError
from ..group.quotients import QuotientElement, QuotientSpec
from ..ring.matrix import AnyPolynomial, RingMatrix, trace_element
from ..ring.element import RingElement
from ..spectral.density import SpectralDensity
from ..utils.config import default_settings
from ..utils.logger import get_logger

logger = get_logger(__name__)

SparseEntries = Dict[Tuple[int, int], Fraction]


@dataclass(frozen=True)
class FiniteQuotient:
    """
    A finite group G = pi / Gamma enumerated from generator images

    Elements are listed in breadth-first discovery order with the identity
    at index 0. generator_actions[i] is right multiplication by generator
    i + 1 as a permutation of element indices.
    """
    spec: QuotientSpec
    elements: Tuple[QuotientElement, ...]
    generator_actions: Tuple[Tuple[int, ...], ...]
    index: Dict[QuotientElement, int] = field(compare=False, repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def name(self) -> str:
        return self.spec.name

    def index_of(self, element: QuotientElement) -> int:
        try:
            return self.index[element]
        except KeyError:
            raise QuotientError(f"{element} is not an element of '{self.name}'") from None

    def right_multiplication(self, element: QuotientElement) -> List[int]:
        """Permutation x -> index(x . element)"""
        multiply = self.spec.multiply
        return [self.index_of(multiply(x, element)) for x in self.elements]


def enumerate_quotient(q: QuotientSpec, cap: Optional[int] = None) -> FiniteQuotient:
    """
    Breadth-first closure of the generator images

    Returns:
        FiniteQuotient with deterministic element order, identity first
    """
    if not q.is_finite:
        raise QuotientError(f"quotient '{q.name}' is infinite; use the abelian backend")
    if cap is None:
        cap = default_settings().quotient_cap

    generators = [q.image_of_generator(i) for i in range(1, q.rank + 1)]
    moves = generators + [q.image_of_generator(-i) for i in range(1, q.rank + 1)]
    identity = q.identity()
    index: Dict[QuotientElement, int] = {identity: 0}
    elements: List[QuotientElement] = [identity]
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for g in moves:
            y = q.multiply(x, g)
            if y not in index:
                if len(elements) >= cap:
                    raise QuotientError(f"closure of '{q.name}' exceeds {cap} elements")
                index[y] = len(elements)
                elements.append(y)
                queue.append(y)

    actions = tuple(
        tuple(index[q.multiply(x, g)] for x in elements) for g in generators
    )
    logger.info(f"Enumerated quotient '{q.name}': order {len(elements)}")
    return FiniteQuotient(q, tuple(elements), actions, index)


@dataclass(frozen=True)
class PushedMatrix:
    """Sparse real matrix of a ring matrix pushed into a finite quotient"""
    rows: int
    cols: int
    entries: SparseEntries

    def dense(self, cap: Optional[int] = None) -> np.ndarray:
        if cap is None:
            cap = default_settings().dense_cap
        if max(self.rows, self.cols) > cap:
            raise SizeCapError(f"dense {self.rows}x{self.cols} matrix exceeds cap {cap}")
        out = np.zeros((self.rows, self.cols))
        for (r, c), value in self.entries.items():
            out[r, c] = float(value)
        return out

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in self.entries.values())


def push_block_matrix(M: RingMatrix, G: FiniteQuotient) -> PushedMatrix:
    """
    Right regular representation, block by block

    A term c.g of entry (r, c') contributes c at (r|G| + x, c'|G| + y) with
    y = x . image(g), so R(g) R(h) = R(gh) and R(g)^T = R(g^-1).
    """
    n = G.order
    entries: SparseEntries = {}
    cache: Dict[QuotientElement, List[int]] = {}
    for (r, c), elem in M.entries():
        for image, coef in elem.pushforward(G.spec).items():
            forward = cache.get(image)
            if forward is None:
                forward = cache[image] = G.right_multiplication(image)
            for x, y in enumerate(forward):
                slot = (r * n + x, c * n + y)
                total = entries.get(slot, Fraction(0)) + coef
                if total:
                    entries[slot] = total
                else:
                    entries.pop(slot, None)
    return PushedMatrix(M.rows * n, M.cols * n, entries)


@dataclass
class QuotientLaplacian:
    """
    Laplacian of the quotient complex Y / Gamma

    The pushed matrix is kept sparse; `matrix` materializes it densely under
    the configured size cap. When the pushed boundary maps are attached the
    exact kernel is computed from their ranks.
    """
    quotient: FiniteQuotient
    block_size: int
    pushed: PushedMatrix
    boundaries: Tuple[Optional[PushedMatrix], Optional[PushedMatrix]] = (None, None)
    dimension: Optional[int] = None
    _kernel: Optional[Fraction] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.block_size * self.quotient.order

    @property
    def matrix(self) -> np.ndarray:
        return self.pushed.dense()


def push_matrix(
    M: RingMatrix,
    G: FiniteQuotient,
    boundaries: Tuple[Optional[RingMatrix], Optional[RingMatrix]] = (None, None),
    dimension: Optional[int] = None,
) -> QuotientLaplacian:
    """
    Push a self-adjoint ring matrix to the finite quotient

    boundaries optionally carries (d_j, d_{j+1}) so that the kernel can be
    computed from their exact ranks.
    """
    if not M.is_square:
        raise DimensionError(f"cannot push non-square {M.rows}x{M.cols} Laplacian")
    if not M.self_adjoint:
        raise NotSelfAdjointError("push_matrix needs a matrix flagged self-adjoint")
    pushed = push_block_matrix(M, G)
    for (r, c), value in pushed.entries.items():
        if pushed.entries.get((c, r)) != value:
            raise NotSelfAdjointError(f"pushed matrix of '{G.name}' is not symmetric at ({r}, {c})")
    pushed_boundaries = tuple(
        push_block_matrix(d, G) if d is not None else None for d in boundaries
    )
    return QuotientLaplacian(G, M.rows, pushed, pushed_boundaries, dimension)


def kernel_dim_exact(L: QuotientLaplacian) -> Fraction:
    """
    F_n(0) = (a_j |G| - rank) / |G| with the rank computed exactly

    With boundaries attached, rank Delta_j = rank d_j + rank d_{j+1}, since
    the images of d_j^T d_j and d_{j+1} d_{j+1}^T are orthogonal.
    """
    from .exact import rank_exact

    if L._kernel is not None:
        return L._kernel
    d_down, d_up = L.boundaries
    if d_down is not None or d_up is not None:
        rank = sum(rank_exact(d.entries) for d in (d_down, d_up) if d is not None)
    else:
        rank = rank_exact(L.pushed.entries)
    L._kernel = Fraction(L.size - rank, L.quotient.order)
    logger.debug(f"Exact rank {rank} of size {L.size} over '{L.quotient.name}'")
    return L._kernel


def spectrum(L: QuotientLaplacian) -> np.ndarray:
    """
    All eigenvalues, ascending, with the exact kernel snapped to 0
    """
    try:
        values = linalg.eigvalsh(L.matrix)
    except linalg.LinAlgError as exc:
        raise SpectralError(f"eigensolver failed on '{L.quotient.name}': {exc}") from exc
    values = np.sort(values)
    kernel = kernel_dim_exact(L) * L.quotient.order
    kernel_count = int(kernel)

    snap = default_settings().kernel_snap_tolerance
    floating = int(np.count_nonzero(np.abs(values) < snap))
    if floating != kernel_count:
        logger.warning(
            f"'{L.quotient.name}': {floating} eigenvalues below {snap} but exact kernel is {kernel_count}"
        )
    values[:kernel_count] = 0.0
    if kernel_count < len(values) and values[kernel_count] <= 0:
        raise SpectralError(
            f"'{L.quotient.name}': eigenvalue {values[kernel_count]} outside the exact kernel is not positive"
        )
    return values


def vn_trace_quotient(
    M: RingMatrix,
    p: AnyPolynomial,
    G: FiniteQuotient,
    trace: Optional[RingElement] = None,
) -> Fraction:
    """
    Normalized trace (1/|G|) tr p(M_G), computed on the ring side

    tr R(g) is |G| when g maps to the identity and 0 otherwise, so this is
    the sum of the coefficients of trivial words of sum_j p(M)_jj.
    """
    if trace is None:
        trace = trace_element(M, p)
    return trace.trivial_coefficient(G.spec)


def step_density(L: QuotientLaplacian, label: str = "") -> SpectralDensity:
    """Step density of L: the exact kernel at 0 and weight 1/|G| per eigenvalue"""
    values = spectrum(L)
    order = L.quotient.order
    kernel = kernel_dim_exact(L)
    kernel_count = int(kernel * order)
    jumps = [(0.0, kernel)] + [(float(v), Fraction(1, order)) for v in values[kernel_count:]]
    return SpectralDensity.step(
        jumps,
        normalization=L.block_size,
        label=label or L.quotient.name,
        merge_tolerance=default_settings().jump_tolerance,
    )


def export_elements(G: FiniteQuotient) -> List[Dict]:
    """Element table rows for debugging: index, canonical form, generator actions"""
    return [
        {
            "index": i,
            "element": list(element),
            "actions": [action[i] for action in G.generator_actions],
        }
        for i, element in enumerate(G.elements)
    ]

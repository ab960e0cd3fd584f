from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..errors import ChainConditionError, DimensionError, SchemaError
from ..group.quotients import QuotientSpec
from ..group.words import GroupModel, GroupWord
from ..ring.element import RingElement
from ..ring.matrix import RingMatrix
from ..utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class EquivariantComplex:
    """
    Finite complex X with a chosen lift of every cell to the cover Y

    boundaries[j - 1] is d_j, an a_{j-1} x a_j matrix over Z[pi], so the
    complex has top dimension N = len(cell_counts) - 1 and N boundary maps.
    """
    model: GroupModel
    cell_counts: Tuple[int, ...]
    boundaries: Tuple[RingMatrix, ...]
    name: str = ""
    towers: Dict[str, Tuple[QuotientSpec, ...]] = field(default_factory=dict, compare=False)

    @property
    def top_dimension(self) -> int:
        return len(self.cell_counts) - 1

    def cells(self, j: int) -> int:
        if not 0 <= j <= self.top_dimension:
            return 0
        return self.cell_counts[j]

    def boundary(self, j: int) -> Optional[RingMatrix]:
        """d_j for 1 <= j <= N, None outside that range"""
        if 1 <= j <= self.top_dimension:
            return self.boundaries[j - 1]
        return None


def _check_shapes(cell_counts: Sequence[int], boundaries: Sequence[RingMatrix]) -> None:
    if not cell_counts:
        raise SchemaError("complex needs at least one cell dimension")
    if any(a < 0 for a in cell_counts):
        raise SchemaError(f"cell counts must be non-negative, got {list(cell_counts)}")
    if len(boundaries) != len(cell_counts) - 1:
        raise SchemaError(
            f"{len(cell_counts)} cell dimensions need {len(cell_counts) - 1} boundary maps, "
            f"got {len(boundaries)}"
        )
    for j, d in enumerate(boundaries, start=1):
        expected = (cell_counts[j - 1], cell_counts[j])
        if d.shape != expected:
            raise SchemaError(f"d_{j} has shape {d.shape}, expected {expected}")
        if not d.is_integral():
            raise SchemaError(f"d_{j} has non-integer coefficients")


def _check_simplicial(boundaries: Sequence[RingMatrix]) -> None:
    for j, d in enumerate(boundaries, start=1):
        for col in range(d.cols):
            faces = sum((d.get(row, col).l1_norm() for row in range(d.rows)), 0)
            if faces != j + 1:
                raise SchemaError(f"d_{j} column {col} has {faces} faces, a {j}-simplex has {j + 1}")


def _first_nonzero(product: RingMatrix) -> Optional[Tuple[int, int, RingElement]]:
    for (row, col), elem in product.entries():
        return row, col, elem
    return None


def check_chain_condition(model: GroupModel, boundaries: Sequence[RingMatrix]) -> None:
    """
    d_{j-1} . d_j = 0 for every j

    Free and free abelian models are checked exactly. Presented models are
    checked inside each quotient attached to the model.
    """
    for j in range(2, len(boundaries) + 1):
        product = boundaries[j - 2] @ boundaries[j - 1]
        if model.has_exact_identity:
            residual = _first_nonzero(product)
            if residual is not None:
                row, col, elem = residual
                raise ChainConditionError(j, row, col, str(elem))
            continue

        if not model.quotients:
            logger.warning(f"Presented model has no quotients; chain condition at j={j} unchecked")
            continue
        for q in model.quotients:
            for (row, col), elem in product.entries():
                pushed = elem.pushforward(q)
                if pushed:
                    raise ChainConditionError(j, row, col, str(elem), quotient=q.name)


def build_complex(
    model: GroupModel,
    cell_counts: Sequence[int],
    boundaries: Sequence[RingMatrix],
    name: str = "",
    towers: Optional[Dict[str, Sequence[QuotientSpec]]] = None,
    strict_simplicial: bool = False,
) -> EquivariantComplex:
    """
    Validate and freeze a complex

    Returns:
        EquivariantComplex whose boundary maps satisfy the chain condition
    """
    cell_counts = tuple(int(a) for a in cell_counts)
    boundaries = tuple(boundaries)
    _check_shapes(cell_counts, boundaries)
    if strict_simplicial:
        _check_simplicial(boundaries)
    check_chain_condition(model, boundaries)
    towers = {key: tuple(levels) for key, levels in (towers or {}).items()}
    logger.debug(f"Complex '{name}' validated: cells {list(cell_counts)}")
    return EquivariantComplex(model, cell_counts, boundaries, name, towers)


def load_complex(document: Dict, strict_simplicial: bool = False) -> EquivariantComplex:
    """Parse a complex document (see src.formats.documents) and validate it"""
    from ..formats.documents import parse_complex_document

    parsed = parse_complex_document(document)
    return build_complex(
        parsed.model,
        parsed.cell_counts,
        parsed.boundaries,
        name=parsed.name,
        towers=parsed.towers,
        strict_simplicial=strict_simplicial,
    )


def assemble_laplacian(C: EquivariantComplex, j: int) -> RingMatrix:
    """
    Delta_j = d_j^* d_j + d_{j+1} d_{j+1}^*

    Returns:
        a_j x a_j RingMatrix with the self-adjoint flag verified and set
    """
    if not 0 <= j <= C.top_dimension:
        raise DimensionError(f"dimension {j} outside 0..{C.top_dimension}")
    size = C.cell_counts[j]
    laplacian = RingMatrix.zero(size, size, C.model)
    d_down = C.boundary(j)
    if d_down is not None:
        laplacian = laplacian + d_down.adjoint() @ d_down
    d_up = C.boundary(j + 1)
    if d_up is not None:
        laplacian = laplacian + d_up @ d_up.adjoint()
    return laplacian.mark_self_adjoint()


def euler_characteristic(C: EquivariantComplex) -> int:
    return sum((-1) ** j * a for j, a in enumerate(C.cell_counts))


def fox_derivative(relator: GroupWord, generator: int, model: GroupModel) -> RingElement:
    """
    Suffix Fox derivative, normalized so that
    sum_i (x_i - 1) . D_i(r) = r - 1 in the free group ring
    """
    letters = relator.letters
    terms: List[Tuple[Tuple[int, ...], int]] = []
    for k, letter in enumerate(letters):
        suffix = letters[k + 1:]
        if letter == generator:
            terms.append((suffix, 1))
        elif letter == -generator:
            terms.append(((-generator,) + suffix, -1))
    return RingElement.from_terms(model, terms)


def presentation_complex(
    model: GroupModel,
    relators: Optional[Sequence[GroupWord]] = None,
    name: str = "presentation",
    towers: Optional[Dict[str, Sequence[QuotientSpec]]] = None,
) -> EquivariantComplex:
    """
    One vertex, an edge per generator and a face per relator

    d_1 is the row (x_1 - 1, ..., x_r - 1); column k of d_2 holds the Fox
    derivatives of relator k.
    """
    if relators is None:
        relators = model.relators
    rank = model.rank
    d1 = RingMatrix.from_rows(model, [[
        RingElement.from_word(model, model.generator(i)) - 1 for i in range(1, rank + 1)
    ]])
    boundaries = [d1]
    cells = [1, rank]
    if relators:
        columns = [[fox_derivative(r, i, model) for i in range(1, rank + 1)] for r in relators]
        rows = [[columns[k][i] for k in range(len(relators))] for i in range(rank)]
        boundaries.append(RingMatrix.from_rows(model, rows))
        cells.append(len(relators))
    return build_complex(model, cells, boundaries, name=name, towers=towers)

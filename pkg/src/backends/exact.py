"""
Exact rank over the rationals by sparse fraction-free elimination.

Rows are dicts col -> int. Each incoming row is reduced against the pivot
rows found so far, always at its smallest column, with the update
row <- p * row - c * pivot_row and the content divided out afterwards, so
no fractions and no floating tolerance are involved.
"""

from fractions import Fraction
from math import gcd, lcm
from typing import Dict, Iterable, Mapping, Tuple, Union

import numpy as np

from ..utils.logger import get_logger

logger = get_logger(__name__)

Row = Dict[int, int]
Entry = Union[int, Fraction]


def _primitive(row: Row) -> Row:
    content = 0
    for value in row.values():
        content = gcd(content, value)
        if content == 1:
            break
    if content > 1:
        row = {c: v // content for c, v in row.items()}
    lead = row[min(row)]
    if lead < 0:
        row = {c: -v for c, v in row.items()}
    return row


def _integral_row(row: Mapping[int, Entry]) -> Row:
    """Clear denominators of a rational row"""
    values = {c: Fraction(v) for c, v in row.items() if v}
    if not values:
        return {}
    scale = 1
    for v in values.values():
        scale = lcm(scale, v.denominator)
    return {c: int(v * scale) for c, v in values.items()}


def _reduce(row: Row, pivots: Dict[int, Row]) -> Row:
    while row:
        col = min(row)
        pivot = pivots.get(col)
        if pivot is None:
            return row
        p = pivot[col]
        c = row[col]
        g = gcd(p, c)
        p, c = p // g, c // g
        merged: Row = {k: v * p for k, v in row.items()}
        for k, v in pivot.items():
            value = merged.get(k, 0) - c * v
            if value:
                merged[k] = value
            else:
                merged.pop(k, None)
        row = _primitive(merged) if merged else merged
    return row


def rank_of_rows(rows: Iterable[Mapping[int, Entry]]) -> int:
    """Rank of the matrix whose rows are given as sparse mappings"""
    pivots: Dict[int, Row] = {}
    prepared = [_integral_row(r) for r in rows]
    prepared = [_primitive(r) for r in prepared if r]
    prepared.sort(key=lambda r: (min(r), len(r)))
    for row in prepared:
        reduced = _reduce(row, pivots)
        if reduced:
            pivots[min(reduced)] = reduced
    return len(pivots)


def rank_exact(matrix: Union[np.ndarray, Mapping[Tuple[int, int], Entry]]) -> int:
    """
    Exact rank of an integer or rational matrix

    Accepts a dense numpy array with integral entries or a sparse
    (row, col) -> value mapping.
    """
    rows: Dict[int, Dict[int, Entry]] = {}
    if isinstance(matrix, np.ndarray):
        if matrix.size == 0:
            return 0
        if not np.all(np.equal(np.mod(matrix, 1), 0)):
            raise ValueError("dense input to rank_exact must have integral entries")
        for r, c in zip(*np.nonzero(matrix)):
            rows.setdefault(int(r), {})[int(c)] = int(matrix[r, c])
    else:
        for (r, c), value in matrix.items():
            if value:
                rows.setdefault(r, {})[c] = value
    rank = rank_of_rows(rows.values())
    logger.debug(f"Exact rank {rank} from {len(rows)} nonzero rows")
    return rank

"""Group ring elements, matrices over the group ring and polynomials"""

from .element import RingElement, l1_norm, ring_mul
from .matrix import (
    RingMatrix, adjoint, matrix_poly_apply, norm_bound_K, stabilization_level,
    trace_element, vn_trace_pi,
)
from .polynomial import MU, ChebyshevSeries, Polynomial

__all__ = [
    'RingElement', 'l1_norm', 'ring_mul',
    'RingMatrix', 'adjoint', 'matrix_poly_apply', 'norm_bound_K', 'stabilization_level',
    'trace_element', 'vn_trace_pi',
    'MU', 'ChebyshevSeries', 'Polynomial',
]

"""Quotient backends: finite quotients (exact) and Z^d (Fourier and Folner)"""

from .abelian import (
    FolnerBox, QuadratureResult, TorusSymbol, abelian_density, boundary_ratio,
    fk_logdet_quadrature, folner_compression, folner_density, sdf_quadrature,
    symbol_at, symbol_spectrum_grid,
)
from .exact import rank_exact, rank_of_rows
from .finite import (
    FiniteQuotient, PushedMatrix, QuotientLaplacian, enumerate_quotient, export_elements,
    kernel_dim_exact, push_block_matrix, push_matrix, spectrum, step_density,
    vn_trace_quotient,
)

__all__ = [
    'FolnerBox', 'QuadratureResult', 'TorusSymbol', 'abelian_density', 'boundary_ratio',
    'fk_logdet_quadrature', 'folner_compression', 'folner_density', 'sdf_quadrature',
    'symbol_at', 'symbol_spectrum_grid',
    'rank_exact', 'rank_of_rows',
    'FiniteQuotient', 'PushedMatrix', 'QuotientLaplacian', 'enumerate_quotient', 'export_elements',
    'kernel_dim_exact', 'push_block_matrix', 'push_matrix', 'spectrum', 'step_density',
    'vn_trace_quotient',
]

"""Equivariant cochain complexes and their Laplacians"""

from .cochain import (
    EquivariantComplex, assemble_laplacian, build_complex, check_chain_condition,
    euler_characteristic, fox_derivative, load_complex, presentation_complex,
)

__all__ = [
    'EquivariantComplex', 'assemble_laplacian', 'build_complex', 'check_chain_condition',
    'euler_characteristic', 'fox_derivative', 'load_complex', 'presentation_complex',
]

"""Group words, concrete group models and quotient maps"""

from .words import (
    IDENTITY, GroupModel, GroupWord, ModelKind, commutator, exponent_vector,
    format_word, normal_form, parse_word, word_inv, word_mul, word_power,
)
from .quotients import (
    QuotientKind, QuotientSpec, is_trivial_in_quotient, quotient_image,
    tower_nesting_evidence, trivial_quotient,
)

__all__ = [
    'IDENTITY', 'GroupModel', 'GroupWord', 'ModelKind', 'commutator', 'exponent_vector',
    'format_word', 'normal_form', 'parse_word', 'word_inv', 'word_mul', 'word_power',
    'QuotientKind', 'QuotientSpec', 'is_trivial_in_quotient', 'quotient_image',
    'tower_nesting_evidence', 'trivial_quotient',
]

"""Built-in examples"""

from .builtin import (
    DOCUMENTED_ONLY, NamedExample, affine_quotient, congruence_tower, cyclic_tower,
    dyadic_tower, example_bs12, example_circle, example_torus, example_wedge2,
    factorial_tower, get_example, list_examples, sanov_tower, square_tower,
)

__all__ = [
    'DOCUMENTED_ONLY', 'NamedExample', 'affine_quotient', 'congruence_tower', 'cyclic_tower',
    'dyadic_tower', 'example_bs12', 'example_circle', 'example_torus', 'example_wedge2',
    'factorial_tower', 'get_example', 'list_examples', 'sanov_tower', 'square_tower',
]

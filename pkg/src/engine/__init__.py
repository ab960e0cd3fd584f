"""Tower orchestration and property suites"""

from .checks import run_check_suite, sandwich_checks
from .orchestrator import (
    LevelRow, TowerReport, approximate_all_dimensions, approximate_invariants,
    euler_check, level_torsion, run_level,
)

__all__ = [
    'run_check_suite', 'sandwich_checks',
    'LevelRow', 'TowerReport', 'approximate_all_dimensions', 'approximate_invariants',
    'euler_check', 'level_torsion', 'run_level',
]

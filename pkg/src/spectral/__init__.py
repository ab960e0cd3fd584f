"""Spectral density functions and the checks run on towers of them"""

from .bounds import CheckResult, DecayReport, DecayRow, check_uniform_decay, decay_bound, fit_decay_constant
from .density import DensityKind, LimitRow, SpectralDensity, evaluate_on_grid, sdf_eval, tail_window, tower_limits
from .determinant import (
    detclass_from_logdet, detclass_integral, fk_logdet_step, detclass_liminf_check,
    logdet_nonnegative_check, parts_check, parts_identity_check, torsion_log,
)
from .gap import GapVerdict, gap_criterion

__all__ = [
    'CheckResult', 'DecayReport', 'DecayRow', 'check_uniform_decay', 'decay_bound', 'fit_decay_constant',
    'DensityKind', 'LimitRow', 'SpectralDensity', 'evaluate_on_grid', 'sdf_eval', 'tail_window', 'tower_limits',
    'detclass_from_logdet', 'detclass_integral', 'fk_logdet_step', 'detclass_liminf_check',
    'logdet_nonnegative_check', 'parts_check', 'parts_identity_check', 'torsion_log',
    'GapVerdict', 'gap_criterion',
]

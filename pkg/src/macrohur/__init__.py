"""Heisenberg uncertainty products of a macroscopic oscillator coupled to a small harmonic bath."""

from .closed_form import (
    MarginalDensity,
    VariancePair,
    appendix_product_expression,
    approx_variances_small_gamma,
    cho_ratios,
    marginal_momentum_pdf_n2,
    marginal_position_pdf_n2,
    variance_p_n2,
    variance_p_n3,
    variance_q_n2,
    variance_q_n3,
)
from .errors import (
    ConditioningError,
    ConstructionError,
    DegenerateRotationError,
    InvalidParameterError,
    MacroHurError,
    PrecisionError,
    UnstableModeError,
)
from .hur import Axis, HurResult, ViolationRegion, hur_check, region_nesting_check, scan_region, violation_threshold
from .model import (
    CharacteristicScales,
    ModelParams,
    NormalModes,
    Regime,
    RegimeKind,
    classify_regime,
    effective_frequency,
    hbar_from_scales,
    normal_frequencies_full,
    normal_frequencies_reduced,
    normal_modes,
    reduced_modes,
    rotate_coordinates,
    rotation_angle,
    unrotate_coordinates,
)
from .oracle import Convention, QuadraticForm

__version__ = "0.1.0"

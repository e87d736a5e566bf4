"""Exception hierarchy shared by all modules."""


class MacroHurError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(MacroHurError, ValueError):
    """A model or scan parameter lies outside its admissible range."""


class DegenerateRotationError(MacroHurError):
    """The decoupling angle is undefined because omega == omega_alpha."""


class UnstableModeError(MacroHurError):
    """A normal-mode frequency would be imaginary (non-positive radicand)."""


class ConstructionError(MacroHurError):
    """A quadratic form is not symmetric positive definite."""


class ConditioningError(MacroHurError):
    """A matrix is too ill-conditioned to invert reliably."""


class PrecisionError(MacroHurError):
    """An adaptive quadrature did not reach its tolerance within its budget."""

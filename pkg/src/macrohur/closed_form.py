"""Closed-form marginals and variances of the central oscillator.

Frequencies are passed per environmental oscillator.  ``wp`` and ``wm`` may be
a tuple/list with one entry per oscillator (each a scalar or an array), or a
single scalar/array that is then shared by all of them.  Mixing enters only
through ``a2 = sin(theta)**2``, so the sign convention of the angle never
matters.

The position and momentum densities are the ones obtained by multiplying the
per-oscillator normalized marginals of the shared coordinate.  They are not
normalized to one; their second moments are the variances returned by
:func:`variance_q_n2` and :func:`variance_p_n2`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError


def _per_mode(w, n):
    if isinstance(w, (tuple, list)):
        if len(w) != n:
            raise InvalidParameterError(f"expected {n} mode frequencies, got {len(w)}")
        ws = [np.asarray(v, dtype=float) for v in w]
    else:
        ws = [np.asarray(w, dtype=float)] * n
    for v in ws:
        if not np.all(v > 0):
            raise InvalidParameterError("mode frequencies must be positive")
    return ws


def _check_a2(a2):
    a2 = np.asarray(a2, dtype=float)
    if not np.all((a2 >= 0) & (a2 <= 1)):
        raise InvalidParameterError("a2 = sin(theta)**2 must lie in [0, 1]")
    return a2, 1.0 - a2


def _check_hbar(hbar):
    hbar = np.asarray(hbar, dtype=float)
    if not np.all(hbar > 0):
        raise InvalidParameterError("hbar must be positive")
    return hbar


class Kind(enum.Enum):
    POSITION = "position"
    MOMENTUM = "momentum"


@dataclass(frozen=True)
class MarginalDensity:
    """Gaussian ``normalization * exp(-coefficient * x**2)``.

    ``coefficient`` already contains the ``1/hbar`` factor.
    """

    kind: Kind
    n: int
    normalization: float
    coefficient: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.normalization * np.exp(-self.coefficient * x * x)

    @property
    def total_mass(self) -> float:
        return self.normalization * math.sqrt(math.pi / self.coefficient)

    @property
    def second_moment(self) -> float:
        return self.normalization * math.sqrt(math.pi) / (2.0 * self.coefficient**1.5)

    @property
    def width(self) -> float:
        """Standard deviation of the normalized shape."""
        return math.sqrt(0.5 / self.coefficient)


@dataclass(frozen=True)
class VariancePair:
    var_q: float
    var_p: float
    mean_q: float = 0.0
    mean_p: float = 0.0


def _n2_position_terms(a2, wp, wm):
    a2, b2 = _check_a2(a2)
    wp1, wp2 = _per_mode(wp, 2)
    wm1, wm2 = _per_mode(wm, 2)
    weights = wp1 * wm1 * wp2 * wm2
    den = (a2 * wp1 + b2 * wm1) * (a2 * wp2 + b2 * wm2)
    expo = a2 * wp1 * wp2 * (wm1 + wm2) + b2 * wm1 * wm2 * (wp1 + wp2)
    return weights, den, expo


def _n2_momentum_terms(a2, wp, wm):
    a2, b2 = _check_a2(a2)
    wp1, wp2 = _per_mode(wp, 2)
    wm1, wm2 = _per_mode(wm, 2)
    den = (a2 * wm1 + b2 * wp1) * (a2 * wm2 + b2 * wp2)
    expo = a2 * (wm1 + wm2) + b2 * (wp1 + wp2)
    return den, expo


def marginal_position_pdf_n2(a2, wp, wm, hbar) -> MarginalDensity:
    """Position density of the central oscillator for two environmental oscillators."""
    weights, den, expo = _n2_position_terms(a2, wp, wm)
    hbar = float(_check_hbar(hbar))
    return MarginalDensity(
        kind=Kind.POSITION,
        n=2,
        normalization=float(np.sqrt(weights / den) / (math.pi * hbar)),
        coefficient=float(expo / (hbar * den)),
    )


def marginal_momentum_pdf_n2(a2, wp, wm, hbar) -> MarginalDensity:
    """Momentum density of the central oscillator for two environmental oscillators."""
    den, expo = _n2_momentum_terms(a2, wp, wm)
    hbar = float(_check_hbar(hbar))
    return MarginalDensity(
        kind=Kind.MOMENTUM,
        n=2,
        normalization=float(den**-0.5 / (math.pi * hbar)),
        coefficient=float(expo / (hbar * den)),
    )


def variance_q_n2(a2, wp, wm, hbar):
    """``<q**2>`` for two environmental oscillators (vectorized)."""
    weights, den, expo = _n2_position_terms(a2, wp, wm)
    hbar = _check_hbar(hbar)
    return 0.5 * np.sqrt(hbar / np.pi) * np.sqrt(weights) * den * expo**-1.5


def variance_p_n2(a2, wp, wm, hbar):
    """``<p**2>`` for two environmental oscillators (vectorized)."""
    den, expo = _n2_momentum_terms(a2, wp, wm)
    hbar = _check_hbar(hbar)
    return 0.5 * np.sqrt(hbar / np.pi) * den * expo**-1.5


def variance_q_n3(a2, wp, wm):
    """``<q**2>`` for three environmental oscillators.

    No ``hbar`` enters: the per-oscillator normalizations cancel it exactly
    for three oscillators.
    """
    a2, b2 = _check_a2(a2)
    p1, p2, p3 = _per_mode(wp, 3)
    m1, m2, m3 = _per_mode(wm, 3)
    den = (a2 * p1 + b2 * m1) * (a2 * p2 + b2 * m2) * (a2 * p3 + b2 * m3)
    brace = (
        a2**2 * (p1 * p2 * p3) * (m1 + m2 + m3)
        + a2 * b2 * (
            (m1 * p2 * p3) * (m2 + m3)
            + (p1 * m2 * m3) * (p2 + p3)
            + (p1 * m1) * (p2 * m3 + m2 * p3)
        )
        + b2**2 * (m1 * m2 * m3) * (p1 + p2 + p3)
    )
    return np.sqrt(p1 * m1 * p2 * m2 * p3 * m3) * den * brace**-1.5 / (2 * np.pi)


def variance_p_n3(a2, wp, wm):
    """``<p**2>`` for three environmental oscillators."""
    a2, b2 = _check_a2(a2)
    p1, p2, p3 = _per_mode(wp, 3)
    m1, m2, m3 = _per_mode(wm, 3)
    den = (a2 * m1 + b2 * p1) * (a2 * m2 + b2 * p2) * (a2 * m3 + b2 * p3)
    brace = (
        a2**2 * (m2 * m3 + m1 * (m2 + m3))
        + a2 * b2 * (p2 * m3 + p1 * (m2 + m3) + m2 * p3 + m1 * (p2 + p3))
        + b2**2 * (p2 * p3 + p1 * (p2 + p3))
    )
    return den * brace**-1.5 / (2 * np.pi)


def variances(n, a2, wp, wm, hbar):
    """Dispatch to the N=2 or N=3 formulas; returns ``(var_q, var_p)``."""
    if n == 2:
        return variance_q_n2(a2, wp, wm, hbar), variance_p_n2(a2, wp, wm, hbar)
    if n == 3:
        _check_hbar(hbar)
        return variance_q_n3(a2, wp, wm), variance_p_n3(a2, wp, wm)
    raise InvalidParameterError(f"closed forms exist only for N = 2 and N = 3, not N = {n}")


def approx_variances_small_gamma(omega_alpha, hbar) -> VariancePair:
    """Weak-coupling N=2 variances, where both modes sit at ``omega_alpha``."""
    if not (omega_alpha > 0 and hbar > 0):
        raise InvalidParameterError("omega_alpha and hbar must be positive")
    pref = 2.0**-2.5
    return VariancePair(
        var_q=pref * math.sqrt(hbar / (math.pi * omega_alpha)),
        var_p=pref * math.sqrt(hbar * omega_alpha / math.pi),
    )


@dataclass(frozen=True)
class ChoRatios:
    """Weak-coupling variances relative to the uncoupled oscillator's.

    ``premise`` records whether ``omega0 > sqrt(omega_alpha)``.
    """

    ratio_q: float
    ratio_p: float
    premise: bool


def cho_ratios(omega0, omega_alpha, hbar) -> ChoRatios:
    if not (omega0 > 0 and omega_alpha > 0 and hbar > 0):
        raise InvalidParameterError("omega0, omega_alpha and hbar must be positive")
    pref = 2.0**-1.5
    return ChoRatios(
        ratio_q=pref * omega0 / math.sqrt(math.pi * omega_alpha * hbar),
        ratio_p=pref * math.sqrt(omega_alpha) / (math.sqrt(math.pi * hbar) * omega0),
        premise=omega0 > math.sqrt(omega_alpha),
    )


def appendix_product_expression(a2, d):
    """Closed form offered for the N=3 uncertainty product in terms of ``a2`` and ``d``.

    Evaluated exactly as written; it does not coincide with the product of
    :func:`variance_q_n3` and :func:`variance_p_n3` (see the erratum report).
    """
    a2, b2 = _check_a2(a2)
    d = np.asarray(d, dtype=float)
    if not np.all(d > 0):
        raise InvalidParameterError("d must be positive")
    ab = a2 * b2
    num = ((ab + 1) * d**2 + (1 - 2 * ab) * d) ** 3
    den = (3 * a2**2 * d**2 + 6 * ab * d + 3 * b2**2) * (3 * a2**2 + 6 * ab * d + 3 * d**2 * b2**2)
    return num / den**1.5 / (4 * np.pi**2)


def k_factor(a2, wp, wm):
    """``sqrt((a2 wp + b2 wm)(a2 wm + b2 wp) / (wp wm))``; equals 1 for identical modes.

    The N=2 product is ``hbar * K / (32 pi)``, so ``K`` shifts its violation edge.
    """
    a2, b2 = _check_a2(a2)
    wp, wm = np.asarray(wp, dtype=float), np.asarray(wm, dtype=float)
    return np.sqrt((a2 * wp + b2 * wm) * (a2 * wm + b2 * wp) / (wp * wm))

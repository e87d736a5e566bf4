"""Brute-force reference values for the closed forms.

The ground state is a product of mode Gaussians.  Rewritten in the original
coordinates it is a Gaussian ``exp(-z^T A z / hbar)`` whose marginal
variances come from ``(hbar / 2) A^{-1}``.  Three ways of assembling ``A``
are supported:

``UNSCALED``
    one joint density over ``(q, x_1, ..., x_N)`` with ``q' = q``.
``SCALED_BY_N``
    the same with ``q' = q / N`` (and ``p' = p / N``).
``PAIR_PRODUCT``
    every oscillator pair ``(q', x_alpha)`` keeps its own normalized Gaussian
    and the marginal of the shared coordinate is the product of the
    per-pair marginals, left unnormalized.

Matrix routes use a Cholesky factorization.  The quadrature route integrates
the joint density with nested adaptive Gauss-Kronrod rules.
"""

from __future__ import annotations

import datetime
import enum
import functools
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, linalg

from . import closed_form, model
from .errors import ConditioningError, ConstructionError, InvalidParameterError, PrecisionError

COND_MAX = 1e12


class Convention(enum.Enum):
    UNSCALED = "unscaled"
    SCALED_BY_N = "scaled_by_n"
    PAIR_PRODUCT = "pair_product"


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    """Symmetric positive-definite coefficient matrix of a Gaussian.

    For ``PAIR_PRODUCT`` the matrix is block diagonal with one 2x2 block per
    oscillator, ordered ``(q@1, x_1, q@2, x_2, ...)``.
    """

    matrix: np.ndarray
    order: tuple[str, ...]
    convention: Convention
    n: int

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != len(self.order):
            raise ConstructionError(f"matrix shape {m.shape} does not match order {self.order}")
        if not np.allclose(m, m.T, rtol=0, atol=1e-14 * max(1.0, np.abs(m).max())):
            raise ConstructionError("coefficient matrix is not symmetric")
        try:
            linalg.cholesky(m, lower=True)
        except linalg.LinAlgError as exc:
            raise ConstructionError("coefficient matrix is not positive definite") from exc
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def blocks(self):
        """The per-oscillator 2x2 blocks (``PAIR_PRODUCT`` only)."""
        if self.convention is not Convention.PAIR_PRODUCT:
            raise InvalidParameterError("blocks are defined only for the pair-product form")
        return [self.matrix[2 * k:2 * k + 2, 2 * k:2 * k + 2] for k in range(self.n)]


def _per_mode(w, n):
    if isinstance(w, (tuple, list)):
        if len(w) != n:
            raise InvalidParameterError(f"expected {n} mode frequencies, got {len(w)}")
        return [float(v) for v in w]
    return [float(w)] * n


def _build(n, a, b, wp, wm, convention):
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"N must be a positive integer, got {n!r}")
    n = int(n)
    wp, wm = _per_mode(wp, n), _per_mode(wm, n)
    if min(wp + wm) <= 0:
        raise InvalidParameterError("mode weights must be positive")
    if convention is Convention.PAIR_PRODUCT:
        m = np.zeros((2 * n, 2 * n))
        order = []
        for k in range(n):
            # w+ (b q + a x)^2 + w- (-a q + b x)^2
            m[2 * k:2 * k + 2, 2 * k:2 * k + 2] = [
                [wp[k] * b * b + wm[k] * a * a, a * b * (wp[k] - wm[k])],
                [a * b * (wp[k] - wm[k]), wp[k] * a * a + wm[k] * b * b],
            ]
            order += [f"q@{k + 1}", f"x{k + 1}"]
        return QuadraticForm(m, tuple(order), convention, n)
    s = 1.0 / n if convention is Convention.SCALED_BY_N else 1.0
    m = np.zeros((n + 1, n + 1))
    for k in range(n):
        m[0, 0] += (wp[k] * b * b + wm[k] * a * a) * s * s
        m[0, k + 1] = m[k + 1, 0] = a * b * (wp[k] - wm[k]) * s
        m[k + 1, k + 1] = wp[k] * a * a + wm[k] * b * b
    return QuadraticForm(m, ("q",) + tuple(f"x{k + 1}" for k in range(n)), convention, n)


def build_position_precision(n, a, b, omega_plus, omega_minus, convention=Convention.UNSCALED):
    """Position-space coefficient matrix of the ground state.

    Each oscillator contributes ``w+ (b q' + a x)^2 + w- (-a q' + b x)^2``.
    """
    return _build(n, a, b, omega_plus, omega_minus, Convention(convention))


def build_momentum_precision(n, a, b, omega_plus, omega_minus, convention=Convention.UNSCALED):
    """Momentum-space coefficient matrix: the weights are inverted frequencies."""
    inv_p = [1.0 / w for w in _per_mode(omega_plus, int(n))]
    inv_m = [1.0 / w for w in _per_mode(omega_minus, int(n))]
    return _build(n, a, b, inv_p, inv_m, Convention(convention))


def _spd_inverse_entry(m, cond_max=COND_MAX):
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > cond_max:
        raise ConditioningError(f"condition number {cond:.3g} exceeds {cond_max:.3g}")
    factor = linalg.cho_factor(m, lower=True)
    e0 = np.zeros(m.shape[0])
    e0[0] = 1.0
    return float(linalg.cho_solve(factor, e0)[0])


def _gaussian_product_moment(variances):
    """Second moment of the product of normalized centred Gaussians."""
    variances = np.asarray(variances, dtype=float)
    norm = np.prod((2 * np.pi * variances) ** -0.5, axis=0)
    kappa = np.sum(0.5 / variances, axis=0)
    return norm * np.sqrt(np.pi) / (2 * kappa**1.5)


def marginal_variance(form: QuadraticForm, hbar: float, cond_max: float = COND_MAX) -> float:
    """Second moment of the first coordinate of ``form``."""
    if not hbar > 0:
        raise InvalidParameterError("hbar must be positive")
    if form.convention is Convention.PAIR_PRODUCT:
        per_pair = [0.5 * hbar * _spd_inverse_entry(blk, cond_max) for blk in form.blocks()]
        return float(_gaussian_product_moment(per_pair))
    return 0.5 * hbar * _spd_inverse_entry(form.matrix, cond_max)


def batch_variances(n, a2, wp, wm, hbar, convention=Convention.PAIR_PRODUCT):
    """Vectorized ``(var_q, var_p)`` for identical modes over arrays of cells.

    Used by the scans; builds stacked coefficient matrices and inverts them
    with ``numpy.linalg``.
    """
    convention = Convention(convention)
    a2, wp, wm, hbar = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a2, wp, wm, hbar)))
    a, b = np.sqrt(a2), np.sqrt(1.0 - a2)

    def stacked(u, v):
        if convention is Convention.PAIR_PRODUCT:
            m = np.empty(a.shape + (2, 2))
            m[..., 0, 0] = u * b * b + v * a * a
            m[..., 0, 1] = m[..., 1, 0] = a * b * (u - v)
            m[..., 1, 1] = u * a * a + v * b * b
            s = 0.5 * hbar * np.linalg.inv(m)[..., 0, 0]
            return _gaussian_product_moment(np.broadcast_to(s, (n,) + s.shape))
        s = 1.0 / n if convention is Convention.SCALED_BY_N else 1.0
        m = np.zeros(a.shape + (n + 1, n + 1))
        m[..., 0, 0] = n * (u * b * b + v * a * a) * s * s
        for k in range(1, n + 1):
            m[..., 0, k] = m[..., k, 0] = a * b * (u - v) * s
            m[..., k, k] = u * a * a + v * b * b
        return 0.5 * hbar * np.linalg.inv(m)[..., 0, 0]

    return stacked(wp, wm), stacked(1.0 / wp, 1.0 / wm)


def _star_terms(form: QuadraticForm, hbar):
    """Split ``form`` into a shared q term and per-oscillator (qq, qx, xx) terms."""
    m = form.matrix
    if form.convention is Convention.PAIR_PRODUCT:
        blocks = form.blocks()
        pref = np.prod([math.sqrt(np.linalg.det(bk)) / (math.pi * hbar) for bk in blocks])
        terms = [(bk[0, 0], bk[0, 1], bk[1, 1]) for bk in blocks]
        sigma = max(math.sqrt(hbar / (2 * np.linalg.eigvalsh(bk)[0])) for bk in blocks)
        return pref, 0.0, terms, sigma
    if np.any(m[1:, 1:] != np.diag(np.diag(m[1:, 1:]))):
        raise InvalidParameterError("quadrature oracle needs uncoupled environmental coordinates")
    chol = linalg.cholesky(m, lower=True)
    det = float(np.prod(np.diag(chol))) ** 2
    pref = math.sqrt(det) / (math.pi * hbar) ** (form.dimension / 2)
    terms = [(0.0, m[0, k], m[k, k]) for k in range(1, form.dimension)]
    sigma = math.sqrt(hbar / (2 * np.linalg.eigvalsh(m)[0]))
    return pref, m[0, 0], terms, sigma


def _quad(f, lo, hi, epsabs, epsrel, limit):
    res = integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1)
    if len(res) > 3:
        raise PrecisionError(f"adaptive quadrature failed on [{lo:.3g}, {hi:.3g}]: {res[3]}")
    value, err = res[0], res[1]
    if err > max(epsabs, epsrel * abs(value)):
        raise PrecisionError(f"quadrature error estimate {err:.3g} above tolerance")
    return value


def quadrature_variance(form: QuadraticForm, hbar: float, tol: float = 1e-8, limit: int = 200,
                        moment: int = 2) -> float:
    """Marginal moment of the first coordinate by nested quadrature of the joint density.

    Only forms with at most two environmental oscillators are accepted.  The
    outer integral runs over ``q`` and each inner integral over one ``x``
    (the environmental coordinates are conditionally independent given
    ``q``).  ``limit`` caps the number of subintervals of every adaptive
    rule; running out raises :class:`PrecisionError`.
    """
    if form.n > 2:
        raise InvalidParameterError("quadrature oracle is limited to N <= 2")
    if not hbar > 0:
        raise InvalidParameterError("hbar must be positive")
    pref, shared, terms, sigma = _star_terms(form, hbar)

    def conditional(q, qq, qx, xx):
        width = math.sqrt(hbar / (2 * xx))
        centre = -qx * q / xx
        f = lambda x: math.exp(-(qq * q * q + 2 * qx * q * x + xx * x * x) / hbar)
        return _quad(f, centre - 14 * width, centre + 14 * width, 0.0, 1e-12, limit)

    def integrand(q):
        val = q**moment * math.exp(-shared * q * q / hbar)
        for t in terms:
            val *= conditional(q, *t)
        return pref * val

    span = 14 * sigma
    return _quad(integrand, -span, span, tol / 10, 0.0, limit)


@dataclass(frozen=True)
class OracleReport:
    var_closed_form: float
    var_oracle_matrix: float
    convention: Convention
    normalization: str = "absolute"
    var_oracle_quadrature: float | None = None
    absolute_error: float = field(init=False)
    relative_error: float = field(init=False)

    def __post_init__(self):
        err = abs(self.var_closed_form - self.var_oracle_matrix)
        object.__setattr__(self, "absolute_error", err)
        object.__setattr__(self, "relative_error", err / abs(self.var_oracle_matrix))


def compare(n, a2, wp, wm, hbar, convention, quantity="q", quadrature=False) -> OracleReport:
    """Compare a closed-form variance with the matrix (and optionally quadrature) oracle.

    The N=3 closed forms carry no ``hbar``; they are compared with the oracle
    evaluated at ``hbar = 1`` and the report says so.
    """
    convention = Convention(convention)
    a, b = math.sqrt(a2), math.sqrt(1.0 - a2)
    cf_q, cf_p = closed_form.variances(n, a2, wp, wm, hbar)
    cf = float(cf_q if quantity == "q" else cf_p)
    build = build_position_precision if quantity == "q" else build_momentum_precision
    form = build(n, a, b, wp, wm, convention)
    h = hbar if n == 2 else 1.0
    quad = quadrature_variance(form, h) if quadrature else None
    return OracleReport(
        var_closed_form=cf,
        var_oracle_matrix=marginal_variance(form, h),
        convention=convention,
        normalization="absolute" if n == 2 else "hbar_stripped",
        var_oracle_quadrature=quad,
    )


@dataclass(frozen=True)
class ConsistencyRow:
    gamma: float
    omega_ratio: float
    physical_branch: bool
    full: tuple[float, float]
    reduced: tuple[float, float]

    @property
    def deviation(self) -> tuple[float, float]:
        return abs(self.full[0] - self.reduced[0]), abs(self.full[1] - self.reduced[1])


@dataclass(frozen=True)
class ConsistencyReport:
    rows: tuple[ConsistencyRow, ...]
    max_abs: float
    max_rel: float
    skipped: int


def parameterization_consistency_report(gammas, omega_ratios, n=2, omega_alpha=1.0):
    """Mode frequencies from the full rotation versus the reduced ``(a, b)`` form.

    Both are evaluated with the same angle.  Grid points where either
    construction fails are counted in ``skipped``.
    """
    rows, skipped = [], 0
    for g in gammas:
        for r in omega_ratios:
            try:
                p = model.ModelParams(n=n, omega0=r * omega_alpha, omega_alpha=omega_alpha,
                                      gamma=g, hbar=0.05)
                modes = model.normal_modes(p)
                wp, wm, _ = model.normal_frequencies_reduced(omega_alpha, g, modes.a, modes.b)
            except (model.UnstableModeError, model.DegenerateRotationError, InvalidParameterError):
                skipped += 1
                continue
            rows.append(ConsistencyRow(g, r, modes.c < 0, (modes.omega_plus, modes.omega_minus), (wp, wm)))
    abs_dev = [max(r.deviation) for r in rows]
    rel_dev = [max(r.deviation[0] / r.full[0], r.deviation[1] / r.full[1]) for r in rows]
    return ConsistencyReport(tuple(rows), max(abs_dev, default=0.0), max(rel_dev, default=0.0), skipped)


# calibration

CALIBRATION_A2 = (0.1, 0.3, 0.5, 0.8)
CALIBRATION_D = (0.3, 0.7, 1.0)


@dataclass(frozen=True)
class DeviationRow:
    param1: float
    param2: float
    closed_form: float
    oracle: float

    @property
    def abs_err(self) -> float:
        return abs(self.closed_form - self.oracle)

    @property
    def rel_err(self) -> float:
        return self.abs_err / abs(self.oracle)


@dataclass(frozen=True)
class Calibration:
    selected: Convention
    matched: bool
    tolerance: float
    hbar: float
    max_rel_err: dict
    tables: dict  # (convention, n, quantity) -> tuple[DeviationRow, ...]


def deviation_table(n, quantity, convention, hbar, a2_values=CALIBRATION_A2, d_values=CALIBRATION_D):
    """Rows ``(a2, d, closed_form, oracle)`` with ``omega_minus = 1``, ``omega_plus = d``."""
    rows = []
    for a2 in a2_values:
        for d in d_values:
            rep = compare(n, a2, d, 1.0, hbar, convention, quantity)
            rows.append(DeviationRow(a2, d, rep.var_closed_form, rep.var_oracle_matrix))
    return tuple(rows)


def calibrate(hbar=0.05, tolerance=1e-6) -> Calibration:
    """Pick the convention whose oracle best reproduces the N=2 and N=3 closed forms."""
    tables, worst = {}, {}
    for conv in Convention:
        errs = []
        for n in (2, 3):
            for quantity in ("q", "p"):
                rows = deviation_table(n, quantity, conv, hbar)
                tables[(conv, n, quantity)] = rows
                errs += [r.rel_err for r in rows]
        worst[conv] = max(errs)
    selected = min(Convention, key=lambda c: worst[c])
    return Calibration(selected, worst[selected] <= tolerance, tolerance, hbar, worst, tables)


@functools.cache
def calibrated_convention() -> Convention:
    return calibrate().selected


def format_calibration(cal: Calibration, timestamp: str | None = None) -> str:
    if timestamp is None:
        epoch = os.environ.get("SOURCE_DATE_EPOCH")
        when = (datetime.datetime.fromtimestamp(int(epoch), datetime.timezone.utc) if epoch
                else datetime.datetime.now(datetime.timezone.utc))
        timestamp = when.replace(microsecond=0).isoformat()
    lines = [
        f"selected_convention={cal.selected.value}",
        f"matched={'true' if cal.matched else 'false'}",
        f"tolerance={cal.tolerance:.16e}",
        f"hbar={cal.hbar:.16e}",
        "n_values=2,3",
        "n3_normalization=hbar_stripped",
    ]
    lines += [f"max_rel_err.{c.value}={cal.max_rel_err[c]:.16e}" for c in Convention]
    lines.append(f"timestamp={timestamp}")
    return "\n".join(lines) + "\n"

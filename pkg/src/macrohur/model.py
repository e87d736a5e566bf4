"""Model parameters, characteristic scales and the normal-mode decomposition.

The central oscillator (frequency ``omega0``) is bilinearly coupled to ``N``
identical environmental oscillators (frequency ``omega_alpha``, coupling
``gamma``).  Everything here is dimensionless; the effective Planck constant
``hbar`` is the ratio of the central system's reduced wavelength to its
characteristic length.

All containers are frozen dataclasses and every function is pure.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateRotationError, InvalidParameterError, UnstableModeError

HBAR_BAND = (0.01, 0.1)


def _require_positive(**values):
    for name, value in values.items():
        if not value > 0 or not math.isfinite(value):
            raise InvalidParameterError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class CharacteristicScales:
    """Units of length, energy and mass, plus the two de Broglie wavelengths.

    Parameters
    ----------
    R0, U0, M : float
        Characteristic length, energy and mass.
    lambda0 : float
        Characteristic wavelength of the central system.
    lambda_alpha : float
        Wavelength of the environmental particles.
    """

    R0: float
    U0: float
    M: float
    lambda0: float
    lambda_alpha: float

    def __post_init__(self):
        _require_positive(
            R0=self.R0, U0=self.U0, M=self.M, lambda0=self.lambda0, lambda_alpha=self.lambda_alpha
        )

    @property
    def P0(self) -> float:
        """Unit of momentum, ``sqrt(U0 * M)``."""
        return math.sqrt(self.U0 * self.M)

    @property
    def tau0(self) -> float:
        """Unit of time, ``R0 / sqrt(U0 / M)``."""
        return self.R0 / math.sqrt(self.U0 / self.M)

    @property
    def reduced_lambda0(self) -> float:
        return self.lambda0 / (2 * math.pi)

    @property
    def reduced_lambda_alpha(self) -> float:
        return self.lambda_alpha / (2 * math.pi)


def hbar_from_scales(scales: CharacteristicScales, planck: float | None = None) -> float:
    """Dimensionless Planck parameter ``lambda0 / (2 pi R0)``.

    If ``planck`` (the dimensional reduced Planck constant, in the same unit
    system as the scales) is given, ``planck / (P0 R0)`` is computed as well
    and the two forms must agree to 1e-12 relative.
    """
    hbar = scales.reduced_lambda0 / scales.R0
    if planck is not None:
        _require_positive(planck=planck)
        other = planck / (scales.P0 * scales.R0)
        if abs(other - hbar) > 1e-12 * max(abs(hbar), abs(other)):
            raise InvalidParameterError(
                f"inconsistent scales: lambda0/(2 pi R0) = {hbar!r} but hbar/(P0 R0) = {other!r}"
            )
    return hbar


@dataclass(frozen=True)
class ModelParams:
    """Physical configuration of the coupled system.

    ``gamma`` must lie in ``[0, 1)``.  Zero coupling is accepted here so the
    uncoupled limit can be probed; scans reject it.
    """

    n: int
    omega0: float
    omega_alpha: float
    gamma: float
    hbar: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise InvalidParameterError(f"N must be an integer >= 1, got {self.n!r}")
        _require_positive(omega0=self.omega0, omega_alpha=self.omega_alpha, hbar=self.hbar)
        if not 0 <= self.gamma < 1:
            raise InvalidParameterError(f"gamma must satisfy 0 <= gamma < 1, got {self.gamma!r}")

    @property
    def omega(self) -> float:
        return effective_frequency(self.omega0, self.omega_alpha, self.gamma, self.n)


def effective_frequency(omega0, omega_alpha, gamma, n):
    """Renormalized central frequency ``sqrt(omega0**2 + N * omega_alpha**2 * gamma**2)``."""
    return np.sqrt(np.square(omega0) + n * np.square(omega_alpha) * np.square(gamma))


def coupling_frequency_sq(omega_alpha, gamma):
    """Square of the (imaginary) coupling frequency, ``-2 omega_alpha**2 gamma``."""
    return -2.0 * np.square(omega_alpha) * gamma


@dataclass(frozen=True)
class RotationAngle:
    theta: float
    c: float
    physical_branch: bool
    warning: str | None = None


def rotation_angle(params: ModelParams) -> RotationAngle:
    """Decoupling angle ``theta = arctan(c) / 2`` with ``c = tan(2 theta)``.

    The principal branch is used.  The admissible branch has ``c < 0``; for
    ``c >= 0`` the angle is still returned but carries a warning.
    """
    w2 = params.omega**2
    denom = w2 - params.omega_alpha**2
    if abs(denom) <= 1e-14 * max(w2, params.omega_alpha**2):
        raise DegenerateRotationError(
            f"omega**2 == omega_alpha**2 ({w2!r}); the decoupling angle is undefined"
        )
    c = float(coupling_frequency_sq(params.omega_alpha, params.gamma)) / denom
    theta = 0.5 * math.atan(c)
    warning = None
    if c >= 0:
        warning = (
            f"tan(2 theta) = {c:.6g} >= 0 requires omega0**2 < omega_alpha**2 (1 - N gamma**2); "
            "this ties the coupling strength to N"
        )
    return RotationAngle(theta=theta, c=c, physical_branch=c < 0, warning=warning)


def mode_frequencies(omega, omega_alpha, gamma, theta):
    """Frequencies of the two rotated modes for an arbitrary angle.

    Raises
    ------
    UnstableModeError
        If either squared frequency is not positive.
    """
    s, co = math.sin(theta), math.cos(theta)
    wp2 = coupling_frequency_sq(omega_alpha, gamma)
    plus_sq = omega**2 * co**2 + omega_alpha**2 * s**2 + wp2 * s * co
    minus_sq = omega**2 * s**2 + omega_alpha**2 * co**2 - wp2 * s * co
    if not (plus_sq > 0 and minus_sq > 0):
        raise UnstableModeError(
            f"non-positive squared mode frequency (plus: {plus_sq!r}, minus: {minus_sq!r})"
        )
    return math.sqrt(plus_sq), math.sqrt(minus_sq)


def normal_frequencies_full(params: ModelParams, theta: float):
    """``(omega_plus, omega_minus)`` from the full rotated potential."""
    return mode_frequencies(params.omega, params.omega_alpha, params.gamma, theta)


def normal_frequencies_reduced(omega_alpha, gamma, a, b):
    """``(omega_plus, omega_minus, d)`` in terms of ``a = sin(theta)``, ``b = cos(theta)``.

    ``omega_plus = omega_alpha sqrt(1 - gamma b / a)`` and
    ``omega_minus = omega_alpha sqrt(1 + gamma a / b)``.
    """
    if a == 0 or b == 0:
        raise InvalidParameterError("a and b must both be non-zero")
    plus_sq = 1.0 - gamma * b / a
    minus_sq = 1.0 + gamma * a / b
    if not (plus_sq > 0 and minus_sq > 0):
        raise UnstableModeError(
            f"non-positive radicand (1 - gamma b/a = {plus_sq!r}, 1 + gamma a/b = {minus_sq!r})"
        )
    wp = omega_alpha * math.sqrt(plus_sq)
    wm = omega_alpha * math.sqrt(minus_sq)
    return wp, wm, wp / wm


def mixing_from_ratio(gamma, d):
    """Invert the reduced parameterization: find ``a**2`` giving mode ratio ``d``.

    With ``t = b / a > 0`` the condition ``omega_plus / omega_minus = d`` reads
    ``gamma t**2 - (1 - d**2) t + gamma d**2 = 0``.  The larger root is taken;
    it is the one that sends ``a -> 0`` as ``gamma -> 0`` and has
    ``theta < pi/4``.  Works elementwise on arrays.

    Returns
    -------
    a2 : ndarray
        ``sin(theta)**2``; NaN where no real root exists.
    feasible : ndarray of bool
        False where ``(1 - d**2)**2 < 4 gamma**2 d**2`` or ``d`` is outside ``(0, 1)``.
    """
    gamma, d = np.broadcast_arrays(np.asarray(gamma, dtype=float), np.asarray(d, dtype=float))
    s = 1.0 - d**2
    disc = s**2 - 4.0 * gamma**2 * d**2
    feasible = (disc >= 0) & (d > 0) & (d < 1) & (gamma > 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = (s + np.sqrt(np.where(feasible, disc, np.nan))) / (2.0 * gamma)
        a2 = 1.0 / (1.0 + t**2)
    return a2, feasible


@dataclass(frozen=True)
class NormalModes:
    """Decoupled modes shared by every environmental oscillator."""

    theta: float
    a: float
    b: float
    c: float
    omega_plus: float
    omega_minus: float
    omega_eff: float
    warning: str | None = None

    @property
    def d(self) -> float:
        return self.omega_plus / self.omega_minus

    @property
    def a2(self) -> float:
        return self.a**2

    @property
    def b2(self) -> float:
        return self.b**2


def normal_modes(params: ModelParams) -> NormalModes:
    """Rotation angle and both mode frequencies for ``params``."""
    rot = rotation_angle(params)
    wp, wm = normal_frequencies_full(params, rot.theta)
    return NormalModes(
        theta=rot.theta,
        a=math.sin(rot.theta),
        b=math.cos(rot.theta),
        c=rot.c,
        omega_plus=wp,
        omega_minus=wm,
        omega_eff=float(params.omega),
        warning=rot.warning,
    )


def reduced_modes(omega_alpha: float, gamma: float, d: float) -> NormalModes:
    """Modes on the ``a b > 0`` branch reconstructed from ``(omega_alpha, gamma, d)``."""
    _require_positive(omega_alpha=omega_alpha, gamma=gamma, d=d)
    a2, ok = mixing_from_ratio(gamma, d)
    if not ok:
        raise UnstableModeError(
            f"no real mixing angle gives d = {d!r} at gamma = {gamma!r} "
            "(requires (1 - d**2) >= 2 gamma d and 0 < d < 1)"
        )
    a, b = math.sqrt(float(a2)), math.sqrt(1.0 - float(a2))
    theta = math.atan2(a, b)
    wp, wm, _ = normal_frequencies_reduced(omega_alpha, gamma, a, b)
    return NormalModes(
        theta=theta,
        a=a,
        b=b,
        c=math.tan(2 * theta),
        omega_plus=wp,
        omega_minus=wm,
        omega_eff=float("nan"),
    )


class RegimeKind(enum.Enum):
    QUASI_CLASSICAL_MACROSCOPIC = "QuasiClassicalMacroscopic"
    OUT_OF_BOUNDS = "OutOfBounds"


@dataclass(frozen=True)
class Condition:
    name: str
    satisfied: bool
    values: dict


@dataclass(frozen=True)
class Regime:
    kind: RegimeKind
    diagnostics: tuple[Condition, ...] = field(default_factory=tuple)
    hbar_lower_hint: float = HBAR_BAND[0]
    hbar_upper_hint: float = HBAR_BAND[1]


def classify_regime(params: ModelParams, scales: CharacteristicScales) -> Regime:
    """Check the quasi-classical conditions for ``params.hbar``.

    The system counts as a quasi-classical macroscopic one when ``hbar`` lies in
    the band (0.01, 0.1) and is below ``lambdabar_alpha / R0``.  Two further
    checks are reported but do not enter the verdict.
    """
    hbar, n, g = params.hbar, params.n, params.gamma
    env_ratio = scales.reduced_lambda_alpha / scales.R0
    lo, hi = HBAR_BAND
    checks = (
        Condition("hbar_below_env_wavelength", hbar < env_ratio,
                  {"hbar": hbar, "lambdabar_alpha_over_R0": env_ratio}),
        Condition("hbar_in_macroscopic_band", lo < hbar < hi,
                  {"hbar": hbar, "lower": lo, "upper": hi}),
        Condition("wavelength_inequality",
                  scales.lambda0**2 * (1 - g**2 * n) < scales.lambda_alpha**2,
                  {"lhs": scales.lambda0**2 * (1 - g**2 * n), "rhs": scales.lambda_alpha**2}),
        Condition("n_gamma_sq_below_one", n * g**2 < 1, {"n_gamma_sq": n * g**2}),
    )
    ok = checks[0].satisfied and checks[1].satisfied
    kind = RegimeKind.QUASI_CLASSICAL_MACROSCOPIC if ok else RegimeKind.OUT_OF_BOUNDS
    return Regime(kind=kind, diagnostics=checks)


def _check_normalized(a, b):
    if abs(a * a + b * b - 1.0) > 1e-12:
        raise InvalidParameterError(f"(a, b) must satisfy a**2 + b**2 = 1, got {a * a + b * b!r}")


def rotate_coordinates(q, x, a, b):
    """Map ``(q', x_alpha)`` (or a momentum pair) to the ``(+, -)`` mode coordinates."""
    _check_normalized(a, b)
    return b * q + a * x, -a * q + b * x


def unrotate_coordinates(x_plus, x_minus, a, b):
    """Inverse of :func:`rotate_coordinates`."""
    _check_normalized(a, b)
    return b * x_plus - a * x_minus, a * x_plus + b * x_minus

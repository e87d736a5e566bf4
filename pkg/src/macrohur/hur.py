"""Heisenberg products, violation thresholds and parameter-space scans.

Scans run over two of the three axes ``hbar``, ``omega_alpha`` and ``d``.
The remaining axis and the coupling ``gamma`` are fixed.  At every cell the
mixing angle is recovered from ``(gamma, d)``, which gives
``omega_plus = d * omega_minus``, and the variances are then evaluated.
Cells with no real mixing angle are kept in the grid and flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import closed_form, model, oracle
from ._io import fmt
from .errors import InvalidParameterError

AXIS_NAMES = ("hbar", "omega_alpha", "d")
DEFAULT_RANGES = {"hbar": (0.01, 0.1), "omega_alpha": (0.1, 5.0), "d": (0.05, 1.0)}
DEFAULT_STEPS = 200
DEFAULT_FIXED = {"hbar": 0.05, "omega_alpha": 1.0, "d": 0.5, "gamma": 0.1}

FLAG_OK = ""
FLAG_UNSTABLE = "unstable"


@dataclass(frozen=True)
class HurResult:
    var_q: float
    var_p: float
    hbar: float
    product: float = field(init=False)
    bound: float = field(init=False)
    violated: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "product", self.var_q * self.var_p)
        object.__setattr__(self, "bound", self.hbar**2 / 4)
        object.__setattr__(self, "violated", bool(self.product < self.bound))


def hur_check(var_q, var_p, hbar) -> HurResult:
    """Compare ``var_q * var_p`` with ``hbar**2 / 4``; equality is not a violation."""
    if not (var_q > 0 and var_p > 0):
        raise InvalidParameterError(f"variances must be positive, got {var_q!r} and {var_p!r}")
    if not hbar > 0:
        raise InvalidParameterError(f"hbar must be positive, got {hbar!r}")
    return HurResult(float(var_q), float(var_p), float(hbar))


def violation_threshold(n: int) -> float:
    """Lower edge of the violation range, ``N**(-3/(N-1)) / pi``.

    It solves ``hbar**(N-1) = 1 / (N**3 pi**(N-1))``, the point where the
    identical-mode product meets the bound.
    """
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise InvalidParameterError(f"the threshold needs N >= 2, got {n!r}")
    n = int(n)
    return (n**3 * math.pi ** (n - 1)) ** (-1.0 / (n - 1))


def violation_band(n: int):
    """``(hbar_min, 0.1)``, or None when the threshold lies above the band."""
    lo = max(violation_threshold(n), model.HBAR_BAND[0])
    return (lo, model.HBAR_BAND[1]) if lo < model.HBAR_BAND[1] else None


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise InvalidParameterError(f"unknown axis {self.name!r}; choose from {AXIS_NAMES}")
        if not (self.steps >= 1 and int(self.steps) == self.steps):
            raise InvalidParameterError(f"axis {self.name}: steps must be a positive integer")
        if not (0 < self.lo < self.hi and math.isfinite(self.hi)):
            raise InvalidParameterError(f"axis {self.name}: need 0 < min < max, got {self.lo}, {self.hi}")

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """Parse ``name:min:max:steps``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise InvalidParameterError(f"grid spec {text!r} is not axis:min:max:steps")
        try:
            return cls(parts[0], float(parts[1]), float(parts[2]), int(parts[3]))
        except ValueError as exc:
            raise InvalidParameterError(f"grid spec {text!r}: {exc}") from None

    @classmethod
    def default(cls, name: str) -> "Axis":
        return cls(name, *DEFAULT_RANGES[name], DEFAULT_STEPS)

    @property
    def values(self) -> np.ndarray:
        """Cell centres, so the open interval ``(lo, hi)`` is never left."""
        h = (self.hi - self.lo) / self.steps
        return self.lo + h * (np.arange(self.steps) + 0.5)

    def spec(self) -> str:
        return f"{self.name}:{self.lo!r}:{self.hi!r}:{self.steps}"


@dataclass(frozen=True, eq=False)
class ViolationRegion:
    """A scanned grid; arrays are indexed ``[i_axis1, i_axis2]``."""

    n: int
    axes: tuple[Axis, Axis]
    fixed: dict
    source: str
    convention: str | None
    var_q: np.ndarray
    var_p: np.ndarray
    bound: np.ndarray
    violated: np.ndarray
    flags: np.ndarray
    k_factor: np.ndarray

    @property
    def cells(self) -> np.ndarray:
        return self.violated

    @property
    def product(self) -> np.ndarray:
        return self.var_q * self.var_p

    @property
    def area_fraction(self) -> float:
        return int(np.count_nonzero(self.violated)) / self.violated.size

    @property
    def unstable_count(self) -> int:
        return int(np.count_nonzero(self.flags == FLAG_UNSTABLE))

    def threshold_violated(self) -> np.ndarray:
        """Verdict from :func:`violation_threshold` alone (identical-mode edge, K = 1)."""
        hbar = np.sqrt(4 * self.bound)
        return (hbar > violation_threshold(self.n)) & (self.flags == FLAG_OK)

    def to_csv(self) -> str:
        g1, g2 = np.meshgrid(self.axes[0].values, self.axes[1].values, indexing="ij")
        lines = ["axis1,axis2,varQ,varP,product,bound,violated,flag"]
        prod = self.product
        for idx in np.ndindex(self.violated.shape):
            lines.append(",".join((
                fmt(g1[idx]), fmt(g2[idx]), fmt(self.var_q[idx]), fmt(self.var_p[idx]),
                fmt(prod[idx]), fmt(self.bound[idx]),
                "1" if self.violated[idx] else "0", str(self.flags[idx]),
            )))
        return "\n".join(lines) + "\n"


def _grid_parameters(axes, fixed):
    names = [ax.name for ax in axes]
    if len(set(names)) != len(names):
        raise InvalidParameterError(f"duplicate scan axes {names}")
    values = dict(DEFAULT_FIXED)
    values.update(fixed or {})
    g = values["gamma"]
    if not 0 < g < 1:
        raise InvalidParameterError(f"scans need 0 < gamma < 1, got {g!r}")
    for name in AXIS_NAMES:
        if name not in names and not values[name] > 0:
            raise InvalidParameterError(f"fixed {name} must be positive, got {values[name]!r}")
    shape = tuple(ax.steps for ax in axes)
    grids = np.meshgrid(*(ax.values for ax in axes), indexing="ij")
    out = {}
    for name in AXIS_NAMES:
        if name in names:
            out[name] = grids[names.index(name)]
        else:
            out[name] = np.full(shape, float(values[name]))
    return out, {k: v for k, v in values.items() if k not in names}


def scan_region(n, axes, fixed=None, source="closed_form", convention=None) -> ViolationRegion:
    """Evaluate the violation predicate on a rectangular grid.

    Parameters
    ----------
    n : int
        Number of environmental oscillators.  The closed-form source needs
        N in {2, 3}; the oracle source accepts any N >= 2.
    axes : sequence of Axis
        One or two axes.  A single axis is padded with a one-cell axis of a
        fixed parameter so the grid is always two-dimensional.
    fixed : dict, optional
        Values for ``gamma`` and every parameter that is not an axis.
    source : {"closed_form", "oracle"}
    convention : oracle convention, defaults to the calibrated one.
    """
    source = source.replace("-", "_")
    if source not in ("closed_form", "oracle"):
        raise InvalidParameterError(f"unknown variance source {source!r}")
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise InvalidParameterError(f"scans need N >= 2, got {n!r}")
    if source == "closed_form" and n not in (2, 3):
        raise InvalidParameterError(f"closed forms exist only for N = 2, 3 (got N = {n})")
    axes = tuple(axes)
    if not 1 <= len(axes) <= 2:
        raise InvalidParameterError("a scan takes one or two axes")
    if len(axes) == 1:
        other = next(nm for nm in AXIS_NAMES if nm != axes[0].name)
        val = dict(DEFAULT_FIXED, **(fixed or {}))[other]
        axes = (axes[0], Axis(other, val * (1 - 1e-12), val * (1 + 1e-12), 1))
    p, fixed_out = _grid_parameters(axes, fixed)

    a2, ok = model.mixing_from_ratio(fixed_out["gamma"], p["d"])
    a2 = np.where(ok, a2, 0.5)
    wm = p["omega_alpha"] * np.sqrt(1.0 + fixed_out["gamma"] * np.sqrt(a2 / (1.0 - a2)))
    wp = p["d"] * wm
    hbar = p["hbar"]
    conv = None
    with np.errstate(all="ignore"):
        if source == "closed_form":
            var_q, var_p = closed_form.variances(int(n), a2, wp, wm, hbar)
            var_q = np.broadcast_to(var_q, hbar.shape).astype(float)
            var_p = np.broadcast_to(var_p, hbar.shape).astype(float)
        else:
            conv = oracle.Convention(convention) if convention else oracle.calibrated_convention()
            var_q, var_p = oracle.batch_variances(int(n), a2, wp, wm, hbar, conv)
    bound = hbar**2 / 4
    flags = np.where(ok, FLAG_OK, FLAG_UNSTABLE)
    violated = ok & (var_q * var_p < bound)
    var_q = np.where(ok, var_q, np.nan)
    var_p = np.where(ok, var_p, np.nan)
    return ViolationRegion(
        n=int(n), axes=axes, fixed=fixed_out, source=source,
        convention=conv.value if conv else None,
        var_q=var_q, var_p=var_p, bound=bound, violated=violated, flags=flags,
        k_factor=np.where(ok, closed_form.k_factor(a2, wp, wm), np.nan),
    )


@dataclass(frozen=True)
class NestingResult:
    holds: bool
    counterexamples: tuple  # (n_more, n_fewer, i, j)


def region_nesting_check(regions) -> NestingResult:
    """Check that each region is contained in the previous one.

    ``regions`` must be ordered from fewest to most environmental oscillators
    and share the same axes.
    """
    regions = list(regions)
    for r in regions[1:]:
        if tuple(ax.spec() for ax in r.axes) != tuple(ax.spec() for ax in regions[0].axes):
            raise InvalidParameterError("regions were scanned on different grids")
    bad = []
    for fewer, more in zip(regions, regions[1:]):
        for i, j in zip(*np.nonzero(more.violated & ~fewer.violated)):
            bad.append((more.n, fewer.n, int(i), int(j)))
    return NestingResult(not bad, tuple(bad))


def threshold_table(ns) -> str:
    lines = ["N,hbar_min_exact,hbar_min_rounded"]
    for n in ns:
        t = violation_threshold(n)
        lines.append(f"{n},{fmt(t)},{round(t, 2):.2f}")
    return "\n".join(lines) + "\n"

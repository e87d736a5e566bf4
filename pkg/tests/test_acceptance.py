"""Acceptance criteria, each at its stated tolerance.

Criterion 5b (closed-oscillator ratio inequalities on sampled points) is
expected to fail; see the ratio-condition tests in ``test_closed_form.py``
for the exact region where both inequalities hold.
"""

import math
import time

import numpy as np
import pytest
from scipy import integrate

from macrohur import closed_form as cf
from macrohur import hur, oracle
from macrohur.hur import Axis


def criterion(key, title):
    return pytest.mark.criterion(key, title)


def _moment(density, k):
    span = 16 * density.width
    return integrate.quad(lambda x: x**k * density(x), -span, span, epsabs=1e-15, epsrel=1e-12, limit=200)[0]


def _random_n2(rng):
    a2 = rng.uniform(0.01, 0.99)
    wp = tuple(rng.uniform(0.1, 5.0, 2))
    wm = tuple(rng.uniform(0.1, 5.0, 2))
    return a2, wp, wm, rng.uniform(0.01, 0.1)


@criterion("1", "threshold reproduction")
@pytest.mark.parametrize("n,rounded", [(2, 0.04), (3, 0.06), (4, 0.08)])
def test_threshold_reproduction(n, rounded):
    ref = n ** (-3 / (n - 1)) / math.pi
    assert abs(hur.violation_threshold(n) - ref) < 1e-6
    assert round(hur.violation_threshold(n), 2) == rounded


@criterion("2", "identical-mode N=3 product constant")
def test_n3_product_constant():
    rng = np.random.default_rng(2)
    a2 = rng.uniform(0, 1, 1000)
    d = rng.uniform(0.05, 1.0, 1000)
    # the d interval is closed at 1
    d[0] = 1.0
    t0 = time.perf_counter()
    prod = cf.variance_q_n3(a2, d, 1.0) * cf.variance_p_n3(a2, d, 1.0)
    assert time.perf_counter() - t0 < 1.0
    assert np.max(np.abs(prod - 1 / (4 * math.pi**2 * 27))) < 1e-10


@criterion("3", "N=2 density second moments")
def test_n2_density_second_moments():
    rng = np.random.default_rng(3)
    t0 = time.perf_counter()
    for _ in range(100):
        a2, wp, wm, hbar = _random_n2(rng)
        q = cf.marginal_position_pdf_n2(a2, wp, wm, hbar)
        p = cf.marginal_momentum_pdf_n2(a2, wp, wm, hbar)
        assert abs(_moment(q, 2) - float(cf.variance_q_n2(a2, wp, wm, hbar))) < 1e-6
        assert abs(_moment(p, 2) - float(cf.variance_p_n2(a2, wp, wm, hbar))) < 1e-6
    assert time.perf_counter() - t0 < 30


@criterion("4", "oracle agreement")
@pytest.mark.parametrize("conv", list(oracle.Convention))
def test_matrix_and_quadrature_agree(conv):
    for a2 in oracle.CALIBRATION_A2:
        for d in oracle.CALIBRATION_D:
            for build in (oracle.build_position_precision, oracle.build_momentum_precision):
                form = build(2, math.sqrt(a2), math.sqrt(1 - a2), d, 1.0, conv)
                assert abs(oracle.quadrature_variance(form, 0.05) - oracle.marginal_variance(form, 0.05)) < 1e-6


@criterion("4", "oracle agreement")
def test_closed_forms_match_calibrated_oracle():
    cal = oracle.calibrate(hbar=0.05, tolerance=1e-6)
    assert cal.matched, oracle.format_calibration(cal, timestamp="n/a")
    for (conv, _, _), rows in cal.tables.items():
        if conv is cal.selected:
            assert all(r.rel_err < 1e-6 for r in rows)


@criterion("5a", "weak-coupling reduction at d = 1")
@pytest.mark.parametrize("a2", [0.1, 0.5, 0.9])
@pytest.mark.parametrize("w,hbar", [(1.0, 0.05), (0.3, 0.01), (2.5, 0.1)])
def test_weak_coupling_reduction(a2, w, hbar):
    approx = cf.approx_variances_small_gamma(w, hbar)
    assert abs(float(cf.variance_q_n2(a2, w, w, hbar)) - approx.var_q) < 1e-12
    assert abs(float(cf.variance_p_n2(a2, w, w, hbar)) - approx.var_p) < 1e-12


@criterion("5b", "closed-oscillator ratio inequalities")
def test_cho_ratio_inequalities():
    rng = np.random.default_rng(5)
    hbar = rng.uniform(0.01, 0.1, 100)
    wa = rng.uniform(0.1, 5.0, 100)
    w0 = rng.uniform(np.sqrt(wa), 5.0)
    failures = []
    for h, a, o in zip(hbar, wa, w0):
        r = cf.cho_ratios(o, a, h)
        assert r.premise
        if not (r.ratio_q > 1 and r.ratio_p < 1):
            failures.append(tuple(round(float(v), 4) for v in (h, a, o, r.ratio_q, r.ratio_p)))
    assert not failures, f"{len(failures)}/100 points fail, first (hbar, omega_alpha, omega0, ratioQ, ratioP): {failures[0]}"


@criterion("6", "zero first moments")
def test_zero_first_moments():
    rng = np.random.default_rng(6)
    for _ in range(20):
        a2, wp, wm, hbar = _random_n2(rng)
        for dens in (cf.marginal_position_pdf_n2(a2, wp, wm, hbar), cf.marginal_momentum_pdf_n2(a2, wp, wm, hbar)):
            assert abs(_moment(dens, 1)) < 1e-12
        a, b = math.sqrt(a2), math.sqrt(1 - a2)
        for conv in oracle.Convention:
            for build in (oracle.build_position_precision, oracle.build_momentum_precision):
                form = build(2, a, b, wp, wm, conv)
                assert abs(oracle.quadrature_variance(form, hbar, moment=1)) < 1e-12


@criterion("7", "violation regions shrink and nest with N")
def test_violation_regions():
    axes = (Axis.default("hbar"), Axis.default("d"))
    t0 = time.perf_counter()
    regions = [hur.scan_region(2, axes), hur.scan_region(3, axes), hur.scan_region(4, axes, source="oracle")]
    elapsed = time.perf_counter() - t0
    assert all(r.violated.size == 200 * 200 for r in regions)
    f2, f3, f4 = (r.area_fraction for r in regions)
    assert f2 > f3 > f4
    assert hur.region_nesting_check(regions).holds
    assert elapsed < 60


@criterion("8", "saturation is not a violation")
def test_saturation():
    for hbar in np.linspace(0.01, 0.1, 20):
        res = hur.hur_check(hbar / 2, hbar / 2, hbar)
        assert res.product == hbar**2 / 4
        assert not res.violated

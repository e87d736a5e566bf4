"""
Variances and the uncertainty product
=====================================

Evaluate the closed-form variances for two and three environmental
oscillators and compare the product with hbar**2 / 4.
"""

import numpy as np

from macrohur import closed_form, hur, reduced_modes

###############################################################################
# Mode frequencies from the reduced parameterization: fix the coupling and
# pick the frequency ratio d = omega+ / omega-.
modes = reduced_modes(omega_alpha=1.0, gamma=0.1, d=0.6)
print(f"a^2 = {modes.a2:.4f}, omega+ = {modes.omega_plus:.4f}, omega- = {modes.omega_minus:.4f}")

###############################################################################
# Sweep hbar through the macroscopic band.  With three environmental
# oscillators the variances do not depend on hbar at all, so the
# product is fixed while the bound grows.
for n in (2, 3):
    print(f"\nN = {n}   threshold hbar_min = {hur.violation_threshold(n):.6f}")
    for hbar in np.linspace(0.02, 0.1, 5):
        vq, vp = closed_form.variances(n, modes.a2, modes.omega_plus, modes.omega_minus, hbar)
        res = hur.hur_check(vq, vp, hbar)
        print(f"  hbar={hbar:.3f}  product={res.product:.3e}  bound={res.bound:.3e}  violated={res.violated}")

###############################################################################
# Weak coupling: identical mode frequencies give the familiar product
# hbar / (32 pi), independent of the oscillator frequency.
approx = closed_form.approx_variances_small_gamma(omega_alpha=1.0, hbar=0.05)
print(f"\nweak coupling: {approx.var_q * approx.var_p:.6e} vs {0.05 / (32 * np.pi):.6e}")

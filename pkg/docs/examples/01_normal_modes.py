"""
Normal modes of the coupled system
==================================

Rotate one system/environment pair into its two normal modes and check
that the reduced description agrees with the full one.
"""

import numpy as np

from macrohur import ModelParams, classify_regime, normal_frequencies_reduced, normal_modes
from macrohur.model import CharacteristicScales

###############################################################################
# A macroscopic oscillator (omega0 = 2) coupled to two environmental
# oscillators at omega_alpha = 1 with coupling 0.1.
params = ModelParams(n=2, omega0=2.0, omega_alpha=1.0, gamma=0.1, hbar=0.05)
modes = normal_modes(params)
print(f"effective frequency  {params.omega:.6f}")
print(f"mixing angle         {modes.theta:.6f}")
print(f"omega+ / omega-      {modes.omega_plus:.6f} / {modes.omega_minus:.6f}")

###############################################################################
# The same frequencies follow from omega_alpha, gamma and the mixing
# coefficients (a, b) alone.
wp, wm, d = normal_frequencies_reduced(1.0, 0.1, modes.a, modes.b)
print(f"reduced form         {wp:.6f} / {wm:.6f}   d = {d:.6f}")
print("agreement            ", np.allclose([wp, wm], [modes.omega_plus, modes.omega_minus], rtol=1e-13))

###############################################################################
# Is this a quasi-classical macroscopic configuration?  The environment
# wavelength is set to half the system size.
scales = CharacteristicScales(R0=1.0, U0=1.0, M=1.0, lambda0=2 * np.pi * 0.05, lambda_alpha=np.pi)
regime = classify_regime(params, scales)
print("regime               ", regime.kind.value)
for cond in regime.diagnostics:
    print(f"  {cond.name:<28} {cond.satisfied}")

"""
Checking the closed forms against a Gaussian oracle
===================================================

The oracle assembles the ground-state coefficient matrix directly and
marginalizes it, either by Cholesky solves or by nested quadrature.
"""

import math

from macrohur import oracle

###############################################################################
# Which way of assembling the joint Gaussian reproduces the closed forms?
cal = oracle.calibrate(hbar=0.05)
for conv, err in cal.max_rel_err.items():
    print(f"{conv.value:<13} max relative error {err:.2e}")
print("selected:", cal.selected.value)

###############################################################################
# Matrix and quadrature routes agree on a two-oscillator point.
a2 = 0.3
form = oracle.build_position_precision(2, math.sqrt(a2), math.sqrt(1 - a2), 0.7, 1.1, cal.selected)
print(f"matrix     {oracle.marginal_variance(form, 0.05):.12e}")
print(f"quadrature {oracle.quadrature_variance(form, 0.05):.12e}")

"""
Violation regions
=================

Scan hbar against the mode ratio d and watch the violating region shrink
as environmental oscillators are added.  The regions are written as
plot-ready CSV files in the current directory.
"""

from pathlib import Path

from macrohur import hur
from macrohur.hur import Axis

axes = (Axis("hbar", 0.01, 0.1, 120), Axis("d", 0.05, 1.0, 120))

###############################################################################
# Closed forms for N = 2 and 3; the Gaussian oracle for N = 4.
regions = [
    hur.scan_region(2, axes),
    hur.scan_region(3, axes),
    hur.scan_region(4, axes, source="oracle"),
]
for r in regions:
    print(f"N={r.n}: area fraction {r.area_fraction:.3f}, {r.unstable_count} cells without a real mixing angle")
    Path(f"region_N{r.n}.csv").write_text(r.to_csv())

###############################################################################
# Each region should sit inside the one with fewer oscillators.
nest = hur.region_nesting_check(regions)
print("nesting holds:", nest.holds)

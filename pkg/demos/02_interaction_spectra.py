"""Blockade shifts of the three degenerate manifolds for atoms 5 um apart on a line.

For sp and pd only one atom pair is excited, so the spectrum is a fixed set of
numbers times R_nl^2 / R^3.  The spd manifold involves all three pairs and
its spectrum depends on the arrangement.
"""
import numpy as np

from rydtriad.coupling import Geometry, subspace_spectrum

line = Geometry.collinear(5.0, "um")
triangle = Geometry.from_positions([[0, 0, 0], [5, 0, 0], [2.5, 5 * np.sqrt(3) / 2, 0]], "um")

for name, geo in (("collinear", line), ("equilateral", triangle)):
    print(f"-- {name}")
    for kind in ("sp", "pd", "spd"):
        s = subspace_spectrum(kind, 42, geo)
        lo, hi = s.to("MHz").magnitude_range()
        lo_cm, hi_cm = s.to("cm-1").magnitude_range()
        print(f"  {kind:>3}: |shift| {lo:7.3f} .. {hi:7.3f} MHz   ({lo_cm:.2e} .. {hi_cm:.2e} cm^-1)")
    sp = subspace_spectrum("sp", 42, geo)
    print("  sp in units of R^2/R^3:", np.round(np.sort(sp.dimensionless), 6))

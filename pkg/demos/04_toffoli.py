"""Three-step Toffoli on three single atoms, from perfect blockade down to none."""
import math

import numpy as np

from rydtriad.coupling import Geometry, subspace_spectrum
from rydtriad.gatesim import InteractionSpec, run_toffoli_protocol

rabi = 2 * math.pi * 0.1  # rad/us

print(f"{'shift/Rabi':>10} {'fidelity':>10} {'leakage':>10}")
for ratio in (1e4, 1e3, 100, 20, 5, 1):
    res = run_toffoli_protocol(rabi, InteractionSpec.uniform(ratio * rabi))
    print(f"{ratio:10g} {res.fidelity:10.6f} {res.leakage:10.2e}")

res = run_toffoli_protocol(rabi, InteractionSpec.zero())
print("\nno interaction, truth table |c1 c2 t> -> ", [format(k, "03b") for k in res.truth_table()])

# the weakest computed shift of each manifold, Rb atoms 5 um apart
geo = Geometry.collinear(5.0, "um")
spec = InteractionSpec.from_spectra({k: subspace_spectrum(k, 42, geo) for k in ("sp", "pd", "spd")})
res = run_toffoli_protocol(rabi, spec)
print(f"computed shifts, 100 kHz drive: fidelity {res.fidelity:.4f}")
print(np.round(np.abs(res.gate) ** 2, 3))

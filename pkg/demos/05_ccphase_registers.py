"""Controlled-controlled phase on three ensemble registers.

Each register is reduced to its symmetric states (empty, one qubit excitation,
one Rydberg excitation).  The target picks up a sign from its 2 pi pulse only
if neither control sits in its Rydberg level.
"""
import math

import numpy as np

from rydtriad.gatesim import InteractionSpec, run_ccphase_protocol

rabi = 2 * math.pi * 0.1
res = run_ccphase_protocol(rabi, InteractionSpec.uniform(1e4 * rabi))
print("diagonal of the gate on |c1 c2 t>:")
for k, z in enumerate(np.diag(res.gate)):
    print(f"  |{k:03b}>  {z.real:+.5f} {z.imag:+.5f}i")
print(f"fidelity {res.fidelity_raw:.8f}, unitarity error {res.unitarity_error:.1e}")

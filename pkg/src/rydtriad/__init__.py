"""Rydberg dipole-dipole blockade for three atoms in s, p and d states.

Radial and angular matrix elements, interaction matrices of the sp, pd and
spd manifolds, blockade feasibility checks and pulse-level simulation of the
resulting Toffoli and ccphase protocols.
"""
__version__ = "0.1.0"

from .hydrogenics import (EnergyModel, OrbitalState, RadialIntegral, energy_level, laguerre_eval,
                          radial_integral_closed, radial_integral_quadrature, radial_wavefunction)
from .angular import angular_vector_integral, selection_rule_allowed, sph_harm
from .coupling import (Geometry, InteractionMatrix, ShiftSpectrum, assemble_interaction_matrix,
                       build_subspace_basis, eigen_shifts, pair_matrix_element, shifts_physical,
                       subspace_spectrum, uncoupled_state_check)
from .blockade import check_negligibility, enumerate_channels
from .gatesim import InteractionSpec, run_ccphase_protocol, run_toffoli_protocol

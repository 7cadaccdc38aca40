"""Pulse-level simulation of the blockade Toffoli and ccphase protocols.

Dynamics run in the rotating frame where every driven transition is resonant.
A pulse on transition a <-> b of one atom (or register) adds

    (Omega / 2) (e^{i phase} |a><b| + e^{-i phase} |b><a|)

and blockade enters as diagonal energies of the multiply Rydberg-excited
states.  Frequencies are angular, in rad/us; times are in us.

Two models are provided:

* three atoms with levels (0, 1, r1, r2, r3), 125 states;  atom k is only ever
  driven to r_k.  Toffoli qubits |c1 c2 t> live on atoms (1), (3), (2).
* three mesoscopic registers C1, T, C2 truncated to the symmetric
  single-excitation space (0, q, r), 27 states;  collective encoding
  |c1 c2 t> -> register C1, C2, T holding one q-excitation when the bit is 1.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .constants import hartree_to_angular, mhz_to_angular
from .errors import SchedulingError, ValidationError

__all__ = [
    "ATOM_LEVELS",
    "REGISTER_LEVELS",
    "AtomModel",
    "RegisterModel",
    "PulseSpec",
    "InteractionSpec",
    "GateResult",
    "build_hamiltonian",
    "interaction_matrix",
    "evolve",
    "simulate",
    "toffoli_pulses",
    "ccphase_pulses",
    "run_toffoli_protocol",
    "run_ccphase_protocol",
    "fidelity",
    "worst_overlap",
    "frame_adjusted_fidelity",
    "TOFFOLI_IDEAL",
    "CCPHASE_IDEAL",
]

ATOM_LEVELS = ("0", "1", "r1", "r2", "r3")
REGISTER_LEVELS = ("0", "q", "r")
RYDBERG = ("r1", "r2", "r3")
ROLES = {"C1": "r1", "T": "r2", "C2": "r3"}

TOFFOLI_IDEAL = np.block([[np.eye(6), np.zeros((6, 2))],
                          [np.zeros((2, 6)), np.array([[0.0, 1.0], [1.0, 0.0]])]]).astype(complex)
# sign on |c1 c2 t> = |001>: target set, both controls 0
CCPHASE_IDEAL = np.diag([1, -1, 1, 1, 1, 1, 1, 1]).astype(complex)
# step C drives the same transitions as step A with the laser phase flipped, so
# an unblocked control returns to its qubit state without the 2 pi sign
STEP_C_PHASE = math.pi


@dataclass(frozen=True)
class AtomModel:
    """Single atom k (0-based) with levels 0, 1, r1, r2, r3; its lasers reach r_{k+1}."""

    index: int
    addressed_rydberg: str = ""

    def __post_init__(self):
        if self.index not in (0, 1, 2):
            raise ValueError("atom index must be 0, 1 or 2")
        expected = RYDBERG[self.index]
        if self.addressed_rydberg == "":
            object.__setattr__(self, "addressed_rydberg", expected)
        elif self.addressed_rydberg != expected:
            raise ValueError(f"atom {self.index + 1} must address {expected}, "
                             f"got {self.addressed_rydberg}")

    levels = ATOM_LEVELS

    def tag(self, level):
        return level if level in RYDBERG else None


@dataclass(frozen=True)
class RegisterModel:
    """Ensemble register in its symmetric <= 1 excitation space: 0, q^1, r^1."""

    role: Literal["C1", "T", "C2"]

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"register role must be one of {tuple(ROLES)}")

    levels = REGISTER_LEVELS

    @property
    def addressed_rydberg(self):
        return ROLES[self.role]

    def tag(self, level):
        return self.addressed_rydberg if level == "r" else None


@dataclass(frozen=True)
class PulseSpec:
    """Square pulse of angular Rabi frequency ``rabi`` and area ``area`` on one target."""

    target: int
    transition: tuple
    rabi: float
    area: float = math.pi
    phase: float = 0.0
    start: float = 0.0

    def __post_init__(self):
        if self.rabi <= 0:
            raise ValueError("Rabi frequency must be positive")
        if self.area <= 0:
            raise ValueError("pulse area must be positive")

    @property
    def duration(self):
        return self.area / self.rabi

    @property
    def end(self):
        return self.start + self.duration


@dataclass(frozen=True)
class InteractionSpec:
    """Blockade energies (rad/us) of the r1-r2, r2-r3 and r1-r2-r3 configurations.

    In ``effective-diagonal`` mode they are diagonal shifts; r1-r3 is never
    shifted.  In ``full-exchange`` mode (atoms only) ``sp`` and ``pd`` are
    exchange couplings |r1 r2> <-> |r2 r1> and |r2 r3> <-> |r3 r2> between the
    atoms concerned, and the triple-excitation spectrum emerges from them.
    """

    mode: Literal["effective-diagonal", "full-exchange"] = "effective-diagonal"
    sp: float = 0.0
    pd: float = 0.0
    spd: float = 0.0

    def __post_init__(self):
        if self.mode not in ("effective-diagonal", "full-exchange"):
            raise ValueError(f"unknown interaction mode {self.mode!r}")
        if not all(np.isfinite([self.sp, self.pd, self.spd])):
            raise ValueError("interaction energies must be finite")

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def uniform(cls, delta, mode="effective-diagonal"):
        return cls(mode, delta, delta, delta)

    @classmethod
    def from_mhz(cls, sp, pd, spd, mode="effective-diagonal"):
        return cls(mode, mhz_to_angular(sp), mhz_to_angular(pd), mhz_to_angular(spd))

    @classmethod
    def from_spectra(cls, spectra, mode="effective-diagonal"):
        """Weakest (smallest nonzero |eigenvalue|) shift of each manifold.

        ``spectra`` maps 'sp', 'pd', 'spd' to :class:`~rydtriad.coupling.ShiftSpectrum`.
        """
        vals = {}
        for kind in ("sp", "pd", "spd"):
            s = spectra[kind].to("hartree")
            vals[kind] = hartree_to_angular(s.min_magnitude_eigenvalue())
        return cls(mode, vals["sp"], vals["pd"], vals["spd"])

    def to_dict(self):
        return {"mode": self.mode, "sp_MHz": self.sp / (2 * math.pi),
                "pd_MHz": self.pd / (2 * math.pi), "spd_MHz": self.spd / (2 * math.pi)}


# ------------------------------------------------------------ Hamiltonians

def _dims(models):
    return [len(m.levels) for m in models]


def _basis(models):
    return list(itertools.product(*[range(len(m.levels)) for m in models]))


def interaction_matrix(models, interaction: InteractionSpec):
    """Time-independent blockade part of the Hamiltonian."""
    basis = _basis(models)
    index = {b: k for k, b in enumerate(basis)}
    dim = len(basis)
    V = np.zeros((dim, dim), dtype=complex)
    if interaction.mode == "effective-diagonal":
        for k, b in enumerate(basis):
            tags = {m.tag(m.levels[i]) for m, i in zip(models, b)}
            if {"r1", "r2", "r3"} <= tags:
                V[k, k] = interaction.spd
            elif {"r1", "r2"} <= tags:
                V[k, k] = interaction.sp
            elif {"r2", "r3"} <= tags:
                V[k, k] = interaction.pd
        return V
    if not all(isinstance(m, AtomModel) for m in models):
        raise ValueError("full-exchange mode needs atoms carrying every Rydberg level")
    J = {frozenset(("r1", "r2")): interaction.sp, frozenset(("r2", "r3")): interaction.pd}
    for k, b in enumerate(basis):
        for i, j in ((0, 1), (0, 2), (1, 2)):
            li, lj = models[i].levels[b[i]], models[j].levels[b[j]]
            coupling = J.get(frozenset((li, lj)))
            if coupling is None or li == lj:
                continue
            swapped = list(b)
            swapped[i] = models[i].levels.index(lj)
            swapped[j] = models[j].levels.index(li)
            V[index[tuple(swapped)], k] += coupling
    return V


def _embed(op, target, dims):
    mats = [np.eye(d) for d in dims]
    mats[target] = op
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def _pulse_operator(model, pulse):
    a, b = pulse.transition
    try:
        ia, ib = model.levels.index(a), model.levels.index(b)
    except ValueError:
        raise ValueError(f"transition {pulse.transition} not in levels {model.levels}") from None
    if isinstance(model, AtomModel) and model.tag(b) not in (None, model.addressed_rydberg):
        raise ValueError(f"atom {model.index + 1} lasers cannot reach {b}")
    d = len(model.levels)
    op = np.zeros((d, d), dtype=complex)
    op[ia, ib] = 0.5 * pulse.rabi * np.exp(1j * pulse.phase)
    op[ib, ia] = np.conj(op[ia, ib])
    return op


def _check_schedule(pulses, n_targets, tol=1e-12):
    for t in range(n_targets):
        mine = sorted((p for p in pulses if p.target == t), key=lambda p: p.start)
        for p, q in zip(mine, mine[1:]):
            if q.start < p.end - tol * max(1.0, abs(p.end)):
                raise SchedulingError(f"pulses on target {t} overlap ({p.start}-{p.end} and {q.start}-{q.end})")


def build_hamiltonian(models, pulses: Sequence[PulseSpec], interaction: InteractionSpec, static=None):
    """H = sum over active pulses + blockade energies.

    ``pulses`` are the pulses active during the segment; ``static`` may pass a
    precomputed :func:`interaction_matrix`.
    """
    dims = _dims(models)
    _check_schedule([PulseSpec(p.target, p.transition, p.rabi, p.area, p.phase, 0.0) for p in pulses],
                    len(models))
    H = interaction_matrix(models, interaction) if static is None else static.copy()
    for p in pulses:
        if not 0 <= p.target < len(models):
            raise ValueError(f"pulse target {p.target} out of range")
        H = H + _embed(_pulse_operator(models[p.target], p), p.target, dims)
    return H


def evolve(obj, H, duration):
    """exp(-i H t) applied to a state vector or propagator."""
    w, V = np.linalg.eigh(H)
    U = (V * np.exp(-1j * w * duration)) @ V.conj().T
    return U @ obj


def simulate(models, pulses: Sequence[PulseSpec], interaction: InteractionSpec):
    """Full propagator of a pulse schedule with piecewise-constant Hamiltonian."""
    _check_schedule(pulses, len(models))
    static = interaction_matrix(models, interaction)
    times = sorted({0.0} | {p.start for p in pulses} | {p.end for p in pulses})
    dim = static.shape[0]
    U = np.eye(dim, dtype=complex)
    for t0, t1 in zip(times, times[1:]):
        if t1 - t0 <= 0:
            continue
        mid = 0.5 * (t0 + t1)
        active = [p for p in pulses if p.start <= mid < p.end]
        H = build_hamiltonian(models, active, interaction, static)
        U = evolve(U, H, t1 - t0)
    return U


# ---------------------------------------------------------------- metrics

def fidelity(U_sim, U_ideal):
    """|Tr(U_ideal^dagger U_sim)| / d."""
    U_sim, U_ideal = np.asarray(U_sim), np.asarray(U_ideal)
    if U_sim.shape != U_ideal.shape or U_sim.shape[0] != U_sim.shape[1]:
        raise ValidationError(f"dimension mismatch {U_sim.shape} vs {U_ideal.shape}")
    return float(abs(np.trace(U_ideal.conj().T @ U_sim)) / U_sim.shape[0])


def worst_overlap(U_sim, U_ideal):
    """min_k |<k| U_ideal^dagger U_sim |k>|."""
    return float(np.abs(np.diag(np.asarray(U_ideal).conj().T @ np.asarray(U_sim))).min())


def _frame(thetas):
    d = np.ones(1, dtype=complex)
    for t in thetas:
        d = np.kron(d, np.array([1.0, np.exp(1j * t)]))
    return d


def frame_adjusted_fidelity(U_sim, U_ideal, n_qubits=3):
    """Fidelity after the best local Z frame changes before and after the gate.

    Returns (fidelity, phases_in, phases_out).  Only single-qubit phase
    rotations are absorbed; anything entangling stays in the error.
    """
    U_sim = np.asarray(U_sim)
    M = np.asarray(U_ideal).conj() * U_sim  # elementwise: conj(I_jk) U_jk

    def fid(x):
        d_in, d_out = _frame(x[:n_qubits]), _frame(x[n_qubits:])
        return abs(d_out @ M @ d_in) / U_sim.shape[0]

    best = max((np.array(x) for x in itertools.product((0.0, math.pi), repeat=2 * n_qubits)), key=fid)
    res = minimize(lambda x: -fid(x), best, method="BFGS", options={"gtol": 1e-12})
    x = res.x if -res.fun >= fid(best) else best
    return float(fid(x)), x[:n_qubits] % (2 * math.pi), x[n_qubits:] % (2 * math.pi)


# --------------------------------------------------------------- protocols

@dataclass
class GateResult:
    protocol: str
    gate: np.ndarray           # projected 8x8 on |c1 c2 t>
    ideal: np.ndarray
    fidelity_raw: float
    fidelity: float            # frame-adjusted
    worst_overlap: float
    leakage: float             # mean population lost from the computational space
    unitarity_error: float     # ||U^dagger U - 1||_2 of the full propagator
    frame_in: np.ndarray = field(default_factory=lambda: np.zeros(3))
    frame_out: np.ndarray = field(default_factory=lambda: np.zeros(3))
    propagator: Optional[np.ndarray] = None

    def truth_table(self):
        """Output basis index with the largest population for each input."""
        return [int(np.argmax(np.abs(self.gate[:, k]) ** 2)) for k in range(8)]

    def to_dict(self):
        return {
            "protocol": self.protocol,
            "fidelity_raw": self.fidelity_raw,
            "fidelity": self.fidelity,
            "worst_overlap": self.worst_overlap,
            "leakage": self.leakage,
            "unitarity_error": self.unitarity_error,
            "frame_in": [float(v) for v in self.frame_in],
            "frame_out": [float(v) for v in self.frame_out],
            "gate": [[[float(z.real), float(z.imag)] for z in row] for row in self.gate],
        }


def _unitarity_error(U):
    return float(np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0]), 2))


def _finish(protocol, U, comp, ideal):
    gate = U[np.ix_(comp, comp)]
    f_adj, th_in, th_out = frame_adjusted_fidelity(gate, ideal)
    return GateResult(
        protocol=protocol,
        gate=gate,
        ideal=ideal,
        fidelity_raw=fidelity(gate, ideal),
        fidelity=f_adj,
        worst_overlap=worst_overlap(gate, ideal),
        leakage=max(0.0, float(1.0 - np.sum(np.abs(gate) ** 2) / 8.0)),
        unitarity_error=_unitarity_error(U),
        frame_in=th_in,
        frame_out=th_out,
        propagator=U,
    )


def toffoli_pulses(rabi, step_c_phase=STEP_C_PHASE):
    """Step A (pi on C1: 0-r1 and C2: 0-r3), step B (pi pulses on T: 0-r2, 1-r2, 0-r2), step C undoes A."""
    T = math.pi / rabi
    pulses = [PulseSpec(0, ("0", "r1"), rabi, start=0.0), PulseSpec(2, ("0", "r3"), rabi, start=0.0)]
    for k, tr in enumerate((("0", "r2"), ("1", "r2"), ("0", "r2"))):
        pulses.append(PulseSpec(1, tr, rabi, start=(1 + k) * T))
    pulses += [PulseSpec(0, ("0", "r1"), rabi, phase=step_c_phase, start=4 * T),
               PulseSpec(2, ("0", "r3"), rabi, phase=step_c_phase, start=4 * T)]
    return pulses


def _toffoli_indices():
    # atoms ordered (C1, T, C2), 5 levels each; qubit basis |c1 c2 t>
    return [c1 * 25 + t * 5 + c2 for c1, c2, t in itertools.product((0, 1), repeat=3)]


def run_toffoli_protocol(rabi, interaction: InteractionSpec, step_c_phase=STEP_C_PHASE):
    """Three-step blockade Toffoli on atoms (C1, T, C2); ``rabi`` in rad/us."""
    models = [AtomModel(0), AtomModel(1), AtomModel(2)]
    U = simulate(models, toffoli_pulses(rabi, step_c_phase), interaction)
    return _finish("toffoli", U, _toffoli_indices(), TOFFOLI_IDEAL)


def ccphase_pulses(rabi, include_step_b=True, step_c_phase=STEP_C_PHASE):
    """Step A (pi on C1: q-r, C2: q-r), step B (2 pi on T: q-r), step C undoes A."""
    T = math.pi / rabi
    pulses = [PulseSpec(0, ("q", "r"), rabi, start=0.0), PulseSpec(2, ("q", "r"), rabi, start=0.0)]
    t_c = T
    if include_step_b:
        pulses.append(PulseSpec(1, ("q", "r"), rabi, area=2 * math.pi, start=T))
        t_c = 3 * T
    pulses += [PulseSpec(0, ("q", "r"), rabi, phase=step_c_phase, start=t_c),
               PulseSpec(2, ("q", "r"), rabi, phase=step_c_phase, start=t_c)]
    return pulses


def _ccphase_indices():
    # registers ordered (C1, T, C2), 3 levels each; qubit basis |c1 c2 t>
    return [c1 * 9 + t * 3 + c2 for c1, c2, t in itertools.product((0, 1), repeat=3)]


def run_ccphase_protocol(rabi, interaction: InteractionSpec, include_step_b=True, step_c_phase=STEP_C_PHASE):
    """Three-step ensemble ccphase; the ideal gate flips the sign of |001> only."""
    if interaction.mode != "effective-diagonal":
        raise ValueError("the register model supports effective-diagonal interactions only")
    models = [RegisterModel("C1"), RegisterModel("T"), RegisterModel("C2")]
    U = simulate(models, ccphase_pulses(rabi, include_step_b, step_c_phase), interaction)
    ideal = CCPHASE_IDEAL if include_step_b else np.eye(8, dtype=complex)
    return _finish("ccphase", U, _ccphase_indices(), ideal)

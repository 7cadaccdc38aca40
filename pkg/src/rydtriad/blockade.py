"""Unwanted (non-resonant) dipole couplings and the blockade negligibility test.

Restricting the dynamics to the sp, pd and spd manifolds is justified when the
second-order shift from every off-resonant channel,

    |<initial| V |final>|^2 / |E_initial - E_final|,

is small against the smallest first-order shift of the manifold the initial
pair belongs to.  Eight channel families are checked, with final principal
quantum numbers scanned over a window around n.

Conventions used here:

* each family acts on the atom pair hosting its initial orbitals: s-p on
  atoms (1, 2), p-d on (2, 3) and s-d on (1, 3);
* the per-channel estimate is the largest, over initial magnetic sublevels, of
  the sum over final sublevels of |V|^2 / |detuning|;
* s-d channels start from |r1; g; r3>, which has no first-order shift, and are
  measured against the smallest first-order shift of any manifold;
* pass/fail uses the sum of margins over all channels of a family group.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .angular import angular_vector_integral
from .constants import HARTREE_TO_MHZ, energy_from_hartree
from .coupling import Geometry, closed_form_source, subspace_spectrum
from .errors import ResonanceAlarm
from .hydrogenics import EnergyModel, L_LABELS, energy_level

__all__ = [
    "CHANNEL_FAMILIES",
    "CouplingChannel",
    "ChannelResult",
    "BlockadeReport",
    "enumerate_channels",
    "channel_detuning",
    "second_order_estimate",
    "first_order_minima",
    "check_negligibility",
]

# (initial l's, final l's, exclude (n1, n2) == (n, n))
CHANNEL_FAMILIES = (
    ((0, 1), (1, 0), True),
    ((0, 1), (1, 2), False),
    ((0, 2), (1, 1), False),
    ((0, 2), (1, 3), False),
    ((1, 2), (0, 1), False),
    ((1, 2), (0, 3), False),
    ((1, 2), (2, 1), True),
    ((1, 2), (2, 3), False),
)

_PAIR_ATOMS = {(0, 1): (0, 1), (1, 2): (1, 2), (0, 2): (0, 2)}
_PAIR_GROUP = {(0, 1): "sp", (1, 2): "pd", (0, 2): "sd"}


@dataclass(frozen=True)
class CouplingChannel:
    family: int
    initial: tuple  # ((n, l_a), (n, l_b))
    final: tuple    # ((n1, l1), (n2, l2))

    def __post_init__(self):
        for (_, l), (_, l2) in zip(self.initial, self.final):
            if abs(l - l2) != 1:
                raise ValueError(f"channel {self.label} violates the dipole selection rule")

    @property
    def atoms(self):
        return _PAIR_ATOMS[(self.initial[0][1], self.initial[1][1])]

    @property
    def group(self):
        return _PAIR_GROUP[(self.initial[0][1], self.initial[1][1])]

    @property
    def label(self):
        def ket(pair):
            return "|" + ",".join(f"{n}{L_LABELS[l]}" for n, l in pair) + ">"
        return f"{ket(self.initial)} -> {ket(self.final)}"


def enumerate_channels(n, n_window=4):
    """All channel instances with n1, n2 in [n - n_window, n + n_window]."""
    if n < 4:
        raise ValueError("need n >= 4 so that f levels exist at n")
    if n_window < 1:
        raise ValueError("n_window must be >= 1")
    channels = []
    for fam, ((la, lb), (l1, l2), exclude_same) in enumerate(CHANNEL_FAMILIES):
        for n1 in range(n - n_window, n + n_window + 1):
            for n2 in range(n - n_window, n + n_window + 1):
                if exclude_same and (n1, n2) == (n, n):
                    continue
                if not (0 <= l1 < n1 and 0 <= l2 < n2):
                    continue
                channels.append(CouplingChannel(fam, ((n, la), (n, lb)), ((n1, l1), (n2, l2))))
    return channels


def channel_detuning(channel, model=None):
    """E_final - E_initial in Hartree (sum of single-atom level energies)."""
    model = model or EnergyModel.hydrogenic()
    (na, la), (nb, lb) = channel.initial
    (n1, l1), (n2, l2) = channel.final
    # fsum is correctly rounded, so permuted pairs cancel to exactly zero
    return math.fsum((energy_level(n1, l1, model), energy_level(n2, l2, model),
                      -energy_level(na, la, model), -energy_level(nb, lb, model)))


@lru_cache(maxsize=256)
def _angular_weight(la, lb, l1, l2, u):
    """max over initial sublevels of sum over final sublevels of |angular factor|^2."""
    u = np.asarray(u)
    best = 0.0
    for ma in range(-la, la + 1):
        for mb in range(-lb, lb + 1):
            acc = 0.0
            for m1 in range(-l1, l1 + 1):
                Ai = angular_vector_integral(la, ma, l1, m1).value
                for m2 in range(-l2, l2 + 1):
                    Aj = angular_vector_integral(lb, mb, l2, m2).value
                    acc += abs(Ai @ Aj - 3.0 * (Ai @ u) * (Aj @ u)) ** 2
            best = max(best, acc)
    return best


def second_order_estimate(channel, geometry: Geometry, model=None, radial_source=None,
                          resonance_threshold=0.0):
    """Worst-sublevel second-order shift (Hartree) induced by ``channel``.

    Raises :class:`ResonanceAlarm` if |detuning| <= ``resonance_threshold``
    (Hartree); an exactly degenerate channel always alarms.
    """
    source = radial_source or closed_form_source()
    det = channel_detuning(channel, model)
    (na, la), (nb, lb) = channel.initial
    (n1, l1), (n2, l2) = channel.final
    if abs(det) <= resonance_threshold or det == 0.0:
        raise ResonanceAlarm(
            f"channel {channel.label} is resonant (detuning {det * HARTREE_TO_MHZ:.4g} MHz)",
            channels=[channel])
    R, u = geometry.pair(*channel.atoms)
    radial = source(na, la, n1, l1) * source(nb, lb, n2, l2) / R**3
    w = _angular_weight(la, lb, l1, l2, tuple(float(c) for c in u))
    return radial**2 * w / abs(det)


@dataclass
class ChannelResult:
    channel: CouplingChannel
    detuning: float          # Hartree
    estimate: float          # Hartree, nan when resonant
    reference: float         # Hartree, first-order shift the estimate is compared with
    resonant: bool = False

    @property
    def margin(self):
        return self.estimate / self.reference if not self.resonant else float("inf")

    def row(self):
        return {
            "family": self.channel.family,
            "group": self.channel.group,
            "channel": self.channel.label,
            "detuning_MHz": energy_from_hartree(self.detuning, "MHz"),
            "second_order_MHz": energy_from_hartree(self.estimate, "MHz"),
            "reference_MHz": energy_from_hartree(self.reference, "MHz"),
            "margin": self.margin,
            "resonant": self.resonant,
        }


@dataclass
class BlockadeReport:
    n: int
    threshold: float
    resonance_threshold: float               # Hartree
    min_first_order: dict                    # subspace -> Hartree
    max_first_order: float                   # Hartree
    results: list = field(default_factory=list)
    margin_sums: dict = field(default_factory=dict)
    max_rabi_mhz: float = float("nan")       # Omega_max / 2 pi
    min_step_duration_us: float = float("nan")

    @property
    def alarms(self):
        return [r.channel for r in self.results if r.resonant]

    @property
    def max_margin(self):
        finite = [r.margin for r in self.results]
        return max(finite) if finite else 0.0

    @property
    def flagged(self):
        return [r.channel for r in self.results if r.margin > self.threshold]

    @property
    def passed(self):
        return not self.alarms and all(s < self.threshold for s in self.margin_sums.values())

    def rows(self):
        return [r.row() for r in self.results]

    def summary(self):
        return {
            "n": self.n,
            "threshold": self.threshold,
            "passed": self.passed,
            "n_channels": len(self.results),
            "n_resonant": len(self.alarms),
            "max_margin": self.max_margin,
            "margin_sums": dict(self.margin_sums),
            "min_first_order_MHz": {k: energy_from_hartree(v, "MHz") for k, v in self.min_first_order.items()},
            "max_first_order_MHz": energy_from_hartree(self.max_first_order, "MHz"),
            "resonance_threshold_MHz": energy_from_hartree(self.resonance_threshold, "MHz"),
            "max_rabi_MHz": self.max_rabi_mhz,
            "min_step_duration_us": self.min_step_duration_us,
        }

    def to_dict(self):
        return {"summary": self.summary(), "channels": self.rows()}


def first_order_minima(n, geometry, radial_source=None):
    """Smallest and largest nonzero first-order shifts (Hartree) of each manifold."""
    minima, maxima = {}, {}
    for kind in ("sp", "pd", "spd"):
        lo, hi = subspace_spectrum(kind, n, geometry, radial_source).magnitude_range()
        minima[kind], maxima[kind] = lo, hi
    return minima, maxima


def check_negligibility(n, geometry, model=None, threshold=0.1, n_window=4,
                        resonance_factor=10.0, rabi_ratio=0.05, rabi_reference="sp",
                        radial_source=None, raise_on_resonance=True):
    """Evaluate every channel and aggregate into a :class:`BlockadeReport`.

    A channel is resonant when |detuning| < ``resonance_factor`` times the
    largest first-order shift.  The recommended Rabi frequency is
    ``rabi_ratio`` times the smallest first-order shift of ``rabi_reference``;
    the matching pi-pulse length is pi / Omega_max.
    """
    model = model or EnergyModel.hydrogenic()
    source = radial_source or closed_form_source()
    minima, maxima = first_order_minima(n, geometry, source)
    largest = max(maxima.values())
    res_thr = resonance_factor * largest
    reference = {"sp": minima["sp"], "pd": minima["pd"], "sd": min(minima.values())}
    report = BlockadeReport(n, threshold, res_thr, minima, largest)
    sums = {"sp": 0.0, "pd": 0.0, "sd": 0.0}
    for ch in enumerate_channels(n, n_window):
        det = channel_detuning(ch, model)
        ref = reference[ch.group]
        try:
            est = second_order_estimate(ch, geometry, model, source, res_thr)
        except ResonanceAlarm:
            report.results.append(ChannelResult(ch, det, float("nan"), ref, resonant=True))
            continue
        report.results.append(ChannelResult(ch, det, float(est), ref))
        sums[ch.group] += float(est / ref)
    report.margin_sums = sums
    f_max = rabi_ratio * energy_from_hartree(minima[rabi_reference], "MHz")
    report.max_rabi_mhz = f_max
    # pi / Omega with Omega = 2 pi f  ->  1 / (2 f)
    report.min_step_duration_us = 1.0 / (2.0 * f_max)
    if report.alarms and raise_on_resonance:
        raise ResonanceAlarm(
            f"{len(report.alarms)} resonant channel(s), first: {report.alarms[0].label}",
            channels=report.alarms, report=report)
    return report

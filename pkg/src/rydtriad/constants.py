"""Unit conversions.

Everything is computed internally in atomic units (Hartree, Bohr radius).
Conversion factors live here and nowhere else.
"""
import math

from scipy.constants import physical_constants

BOHR_RADIUS_M = physical_constants["Bohr radius"][0]

HARTREE_TO_INV_CM = 219474.6314
INV_CM_TO_MHZ = 29979.2458
HARTREE_TO_MHZ = HARTREE_TO_INV_CM * INV_CM_TO_MHZ

ENERGY_UNITS = ("hartree", "cm-1", "MHz")
LENGTH_UNITS = ("a0", "um", "m")

_ENERGY_FACTOR = {
    "hartree": 1.0,
    "cm-1": HARTREE_TO_INV_CM,
    "MHz": HARTREE_TO_MHZ,
}
_LENGTH_TO_BOHR = {
    "a0": 1.0,
    "um": 1e-6 / BOHR_RADIUS_M,
    "m": 1.0 / BOHR_RADIUS_M,
}


def energy_from_hartree(value, unit):
    """Convert an energy (scalar or array) from Hartree to ``unit``."""
    try:
        return value * _ENERGY_FACTOR[unit]
    except KeyError:
        raise ValueError(f"unknown energy unit {unit!r}; expected one of {ENERGY_UNITS}") from None


def energy_to_hartree(value, unit):
    try:
        return value / _ENERGY_FACTOR[unit]
    except KeyError:
        raise ValueError(f"unknown energy unit {unit!r}; expected one of {ENERGY_UNITS}") from None


def length_to_bohr(value, unit):
    try:
        return value * _LENGTH_TO_BOHR[unit]
    except KeyError:
        raise ValueError(f"unknown length unit {unit!r}; expected one of {LENGTH_UNITS}") from None


def mhz_to_angular(f_mhz):
    """Cyclic frequency in MHz -> angular frequency in rad/us."""
    return 2.0 * math.pi * f_mhz


def hartree_to_angular(e_hartree):
    """Energy in Hartree -> angular frequency E/hbar in rad/us."""
    return mhz_to_angular(e_hartree * HARTREE_TO_MHZ)

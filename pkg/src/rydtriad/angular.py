"""Spherical harmonics and the vector angular integrals of the unit radial vector.

    A_{l,m}^{l',m'} = int dOmega e_r(theta, phi) Y*_{lm} Y_{l'm'}

Condon-Shortley phases are used throughout.  The production path uses the
closed-form action of cos(theta) and sin(theta) e^{+-i phi} on Y_lm; a product
Gauss-Legendre (cos theta) x trapezoid (phi) rule is kept as an oracle.
Signs of individual A-vectors depend on the phase convention, spectra of the
interaction matrices built from them do not.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import sph_harm_y

__all__ = [
    "AngularVectorIntegral",
    "sph_harm",
    "selection_rule_allowed",
    "angular_vector_integral",
    "angular_vector_integral_quadrature",
    "harmonic_overlap_quadrature",
    "sphere_quadrature",
]

MAX_L = 10


@dataclass(frozen=True)
class AngularVectorIntegral:
    """Cartesian components (x, y, z) of A_{l,m}^{l',m'}."""

    bra: tuple
    ket: tuple
    value: np.ndarray

    def conj(self):
        return AngularVectorIntegral(self.ket, self.bra, np.conj(self.value))


def _check_lm(l, m):
    if l < 0 or abs(m) > l:
        raise ValueError(f"invalid (l, m) = ({l}, {m})")


def sph_harm(l, m, theta, phi):
    """Y_lm(theta, phi), theta polar and phi azimuthal, Condon-Shortley phase."""
    _check_lm(l, m)
    return sph_harm_y(l, m, theta, phi)


def selection_rule_allowed(l, m, l2, m2):
    """Electric-dipole rule: l' = l +- 1 and |m' - m| <= 1."""
    return abs(l2 - l) == 1 and abs(m2 - m) <= 1


def _cos_coeff(l, m):
    # <l+1, m| cos(theta) |l, m>
    return math.sqrt(((l + 1) ** 2 - m**2) / ((2 * l + 1) * (2 * l + 3)))


def _raise_coeff(l, m, l2):
    """<l2, m+1| sin(theta) e^{i phi} |l, m> for l2 = l +- 1."""
    if l2 == l + 1:
        return -math.sqrt((l + m + 1) * (l + m + 2) / ((2 * l + 1) * (2 * l + 3)))
    if l2 == l - 1 and l >= 1:
        return math.sqrt((l - m) * (l - m - 1) / ((2 * l - 1) * (2 * l + 1)))
    return 0.0


@lru_cache(maxsize=None)
def _closed_form(l, m, l2, m2):
    """<l m| e_r |l2 m2> from ladder-type recursions."""
    vec = np.zeros(3, dtype=complex)
    if not selection_rule_allowed(l, m, l2, m2):
        return vec
    if m == m2:
        # cos(theta) is real-symmetric between l and l+1
        lo, hi = min(l, l2), max(l, l2)
        vec[2] = _cos_coeff(lo, m) if abs(m) <= lo else 0.0
        return vec
    # sin(theta)e^{i phi} raises m by one; its lowering partner is the transpose
    if m == m2 + 1:
        plus, minus = _raise_coeff(l2, m2, l), 0.0
    else:
        plus, minus = 0.0, _raise_coeff(l, m, l2)
    # e_x = (e^{i phi} + e^{-i phi}) sin / 2,  e_y = (e^{i phi} - e^{-i phi}) sin / (2i)
    vec[0] = 0.5 * (plus + minus)
    vec[1] = -0.5j * (plus - minus)
    return vec


def angular_vector_integral(l, m, l2, m2):
    """A_{l,m}^{l',m'} via closed-form dipole coefficients."""
    _check_lm(l, m)
    _check_lm(l2, m2)
    if max(l, l2) > MAX_L:
        raise ValueError(f"l <= {MAX_L} supported")
    return AngularVectorIntegral((l, m), (l2, m2), _closed_form(l, m, l2, m2).copy())


@lru_cache(maxsize=16)
def sphere_quadrature(n_theta, n_phi):
    """Nodes (theta, phi) and weights of a product rule on the unit sphere.

    Gauss-Legendre in cos(theta), uniform trapezoid in phi; exact for
    polynomials in cos(theta) of degree < 2 n_theta times trigonometric
    polynomials in phi of degree < n_phi.
    """
    x, w = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    T, P = np.meshgrid(theta, phi, indexing="ij")
    W = np.outer(w, np.full(n_phi, 2.0 * np.pi / n_phi))
    return T, P, W


def _grid_size(l, l2):
    return 2 * (l + l2 + 2)


def angular_vector_integral_quadrature(l, m, l2, m2, n_nodes=None):
    """A_{l,m}^{l',m'} by direct product quadrature over the sphere."""
    _check_lm(l, m)
    _check_lm(l2, m2)
    n = n_nodes or _grid_size(l, l2)
    T, P, W = sphere_quadrature(n, n)
    f = np.conj(sph_harm(l, m, T, P)) * sph_harm(l2, m2, T, P) * W
    sin_t = np.sin(T)
    er = (sin_t * np.cos(P), sin_t * np.sin(P), np.cos(T))
    value = np.array([np.sum(e * f) for e in er])
    return AngularVectorIntegral((l, m), (l2, m2), value)


def harmonic_overlap_quadrature(l, m, l2, m2, n_nodes=None):
    """int Y*_{lm} Y_{l'm'} dOmega on the same grid as the vector integrals."""
    n = n_nodes or _grid_size(l, l2)
    T, P, W = sphere_quadrature(n, n)
    return complex(np.sum(np.conj(sph_harm(l, m, T, P)) * sph_harm(l2, m2, T, P) * W))

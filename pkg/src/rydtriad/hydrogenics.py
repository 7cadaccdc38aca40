"""Hydrogenic radial functions, radial dipole integrals and level energies.

Conventions
-----------
Associated Laguerre polynomials follow the older (Messiah) normalization

    L_p^k(x) = sum_s (-1)^s [(p+k)!]^2 / ((p-s)! (k+s)! s!) x^s,

which is ``(p+k)!`` times the modern one.  It is paired with the
normalization constant ``N_nl = (2/n^2) sqrt((n-l-1)! / [(n+l)!]^3)`` so that

    R_nl(r) = a^{-3/2} N_nl x^l exp(-x/2) L_{n-l-1}^{2l+1}(x),   x = 2r/(na),

is normalized.  Lengths are in units of ``a = a0/Z``; energies in Hartree.

The closed-form dipole radial integral is a double sum whose terms
alternate in sign and reach magnitudes far beyond 1e100 for n ~ 40, so it is
evaluated in exact rational arithmetic and rounded once at the end.  The
quadrature path is kept as an independent check of that sum.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Literal

import mpmath
import numpy as np

from .errors import AccuracyError, CapacityError, ConfigurationError

__all__ = [
    "L_LABELS",
    "OrbitalState",
    "EnergyModel",
    "RadialIntegral",
    "laguerre_coefficients",
    "laguerre_eval",
    "radial_wavefunction",
    "radial_integral_closed",
    "radial_integral_quadrature",
    "radial_moment_quadrature",
    "energy_level",
]

L_LABELS = "spdfghiklmnoqrtuv"

MAX_LAGUERRE_ORDER = 200
DEFAULT_MAX_BITS = 1 << 18


@dataclass(frozen=True, order=True)
class OrbitalState:
    """Hydrogenic level |n, l, m>."""

    n: int
    l: int
    m: int = 0

    def __post_init__(self):
        for name in ("n", "l", "m"):
            if not isinstance(getattr(self, name), (int, np.integer)):
                raise ValueError(f"{name} must be an integer, got {getattr(self, name)!r}")
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not 0 <= self.l < self.n:
            raise ValueError(f"need 0 <= l < n, got n={self.n}, l={self.l}")
        if abs(self.m) > self.l:
            raise ValueError(f"need |m| <= l, got l={self.l}, m={self.m}")

    @property
    def label(self):
        sub = L_LABELS[self.l] if self.l < len(L_LABELS) else f"[l={self.l}]"
        return f"{self.n}{sub}" if self.l == 0 else f"{self.n}{sub}(m={self.m:+d})"

    @property
    def nl(self):
        return (self.n, self.l)


@dataclass(frozen=True)
class EnergyModel:
    """Unperturbed single-atom level energies.

    ``kind='hydrogenic'`` gives -Z^2/(2n^2) for every l.  ``kind='quantum-defect'``
    gives -Z^2/(2(n - delta_l)^2); the defects are external data supplied by the
    caller (see :meth:`rubidium` for the packaged table).
    """

    kind: Literal["hydrogenic", "quantum-defect"] = "hydrogenic"
    Z: float = 1.0
    defects: dict = field(default_factory=dict)
    source: str = ""

    def __post_init__(self):
        if self.kind not in ("hydrogenic", "quantum-defect"):
            raise ConfigurationError(f"unknown energy model kind {self.kind!r}")
        if self.Z <= 0:
            raise ConfigurationError(f"Z must be positive, got {self.Z}")
        clean = {}
        for l, d in dict(self.defects).items():
            l = int(l)
            d = float(d)
            if d < 0:
                raise ConfigurationError(f"quantum defect for l={l} must be >= 0, got {d}")
            clean[l] = d
        object.__setattr__(self, "defects", clean)

    @classmethod
    def hydrogenic(cls, Z=1.0):
        return cls("hydrogenic", Z)

    @classmethod
    def quantum_defect(cls, defects, Z=1.0, source=""):
        return cls("quantum-defect", Z, defects, source)

    @classmethod
    def from_dict(cls, d):
        return cls(d.get("kind", "hydrogenic"), float(d.get("Z", 1.0)),
                   d.get("defects", {}), d.get("source", ""))

    @classmethod
    def rubidium(cls):
        """Rubidium defects shipped in ``data/rubidium_defects.json``."""
        text = resources.files("rydtriad").joinpath("data/rubidium_defects.json").read_text()
        return cls.from_dict(json.loads(text))

    def to_dict(self):
        return {"kind": self.kind, "Z": self.Z,
                "defects": {str(k): v for k, v in sorted(self.defects.items())},
                "source": self.source}

    def effective_n(self, n, l):
        if self.kind == "hydrogenic":
            return float(n)
        if l not in self.defects:
            raise ConfigurationError(f"no quantum defect configured for l={l}")
        d = self.defects[l]
        if d >= n:
            raise ConfigurationError(f"quantum defect {d} for l={l} is not below n={n}")
        return n - d


@dataclass(frozen=True)
class RadialIntegral:
    """Value of int_0^inf r^3 R_nl R_n'l' dr in units of a = a0/Z."""

    bra: tuple
    ket: tuple
    value: float
    Z: float = 1.0

    @property
    def bohr(self):
        """Same integral expressed in Bohr radii a0."""
        return self.value / self.Z

    def __float__(self):
        return float(self.value)


def _nl(state):
    if isinstance(state, OrbitalState):
        return state.n, state.l
    n, l = state[:2]
    OrbitalState(int(n), int(l))
    return int(n), int(l)


# ---------------------------------------------------------------- Laguerre

@lru_cache(maxsize=1024)
def laguerre_coefficients(p, k):
    """Exact integer coefficients c_s of L_p^k(x) = sum_s c_s x^s (Messiah convention)."""
    if p < 0 or k < 0:
        raise ValueError(f"need p, k >= 0, got p={p}, k={k}")
    if p + k > MAX_LAGUERRE_ORDER:
        raise CapacityError(f"p + k = {p + k} exceeds the supported order {MAX_LAGUERRE_ORDER}")
    top = math.factorial(p + k)
    return tuple(
        (-1) ** s * (top // (math.factorial(p - s) * math.factorial(k + s))) * (top // math.factorial(s))
        for s in range(p + 1)
    )


def laguerre_eval(p, k, x):
    """L_p^k(x) in the Messiah convention, evaluated exactly and rounded once."""
    c = laguerre_coefficients(p, k)
    xq = Fraction(float(x))
    acc = Fraction(0)
    for cs in reversed(c):
        acc = acc * xq + cs
    try:
        return float(acc)
    except OverflowError:
        raise CapacityError(f"L_{p}^{k}({x}) overflows double precision") from None


# ----------------------------------------------------------- wavefunctions

@lru_cache(maxsize=4096)
def _norm_split(n, l):
    """N_nl as (mantissa, binary exponent) to dodge double under/overflow."""
    with mpmath.workdps(40):
        N = mpmath.mpf(2) / n**2 * mpmath.sqrt(
            mpmath.factorial(n - l - 1) / mpmath.factorial(n + l) ** 3)
        m, e = mpmath.frexp(N)
        return float(m), int(e)


def _int_frexp(v):
    """Split a (possibly huge) integer into a float mantissa and a power of two."""
    bits = v.bit_length()
    if bits <= 60:
        m, e = math.frexp(float(v))
        return m, e
    shift = bits - 60
    m, e = math.frexp(float(v >> shift))
    return m, e + shift


def radial_wavefunction(state, r, Z=1.0):
    """R_nl(r) for ``r`` in Bohr radii; returns a float or an array like ``r``.

    Units are a0^{-3/2}.  The polynomial part is evaluated in exact integer
    arithmetic at the binary value of each abscissa, so no cancellation error
    enters; the remaining factors are combined in split mantissa/exponent form.
    """
    n, l = _nl(state)
    p, k = n - l - 1, 2 * l + 1
    coeffs = laguerre_coefficients(p, k)
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise ValueError("r must be non-negative")
    x_arr = 2.0 * Z * r_arr / n
    mN, eN = _norm_split(n, l)
    pref = Z ** 1.5 * mN
    out = np.empty(x_arr.shape)
    flat_x = x_arr.ravel()
    flat_out = out.ravel()
    for i, x in enumerate(flat_x):
        x = float(x)
        if x == 0.0:
            flat_out[i] = math.ldexp(pref * coeffs[0], eN) if l == 0 else 0.0
            continue
        num, den = x.as_integer_ratio()
        dexp = den.bit_length() - 1
        acc = coeffs[p]
        dpow = 1
        for s in range(p - 1, -1, -1):
            dpow <<= dexp
            acc = acc * num + coeffs[s] * dpow
        if acc == 0:
            flat_out[i] = 0.0
            continue
        sign = 1.0 if acc > 0 else -1.0
        mA, eA = _int_frexp(abs(acc))
        val = sign * pref * mA * x**l * math.exp(-0.5 * x)
        flat_out[i] = math.ldexp(val, eA + eN - dexp * p)
    if np.ndim(r) == 0:
        return float(out)
    return out


# ------------------------------------------------------- radial integrals

def _check_bits(q, max_bits):
    if max(q.numerator.bit_length(), q.denominator.bit_length()) > max_bits:
        raise CapacityError(f"exact intermediate exceeds {max_bits} bits")


@lru_cache(maxsize=8192)
def _closed_form(n, l, n2, l2, max_bits):
    f = math.factorial
    lead = Fraction(2 ** (l + l2 + 2) * n ** (2 + l2) * n2 ** (2 + l), (n + n2) ** (4 + l + l2))
    under_root = f(n + l) * f(n2 + l2) * f(n - l - 1) * f(n2 - l2 - 1)
    total = Fraction(0)
    for r in range(n - l):
        for s in range(n2 - l2):
            num = (-2) ** (r + s) * n**s * n2**r * f(3 + l + l2 + r + s)
            den = ((n + n2) ** (r + s) * f(r) * f(s) * f(n - l - r - 1) * f(2 * l + r + 1)
                   * f(n2 - l2 - s - 1) * f(2 * l2 + s + 1))
            total += Fraction(num, den)
        _check_bits(total, max_bits)
    with mpmath.workdps(40):
        v = (mpmath.mpf(lead.numerator) / lead.denominator * mpmath.sqrt(under_root)
             * mpmath.mpf(total.numerator) / total.denominator)
        return float(v)


def radial_integral_closed(n, l, n2, l2, Z=1.0, max_bits=DEFAULT_MAX_BITS):
    """Closed-form int r^3 R_nl R_n'l' dr as a finite double sum, in units of a0/Z.

    Any (l, l') combination is accepted; only |l - l'| = 1 enters dipole
    couplings.  The pair is put in canonical order before evaluation so the
    result is exactly symmetric under bra/ket exchange.
    """
    OrbitalState(n, l)
    OrbitalState(n2, l2)
    a, b = sorted([(n, l), (n2, l2)])
    value = _closed_form(a[0], a[1], b[0], b[1], max_bits)
    return RadialIntegral((n, l), (n2, l2), value, Z)


def _gauss_legendre(order):
    return np.polynomial.legendre.leggauss(order)


def _panel_edges(r_max, first=0.5, ratio=1.15, wave_cap=math.pi * math.sqrt(2.0)):
    """Geometrically graded panel edges on [0, r_max].

    Panel width grows by ``ratio`` but is capped at ``wave_cap * sqrt(r)``, about
    one local de Broglie wavelength of a Rydberg electron at radius r.
    """
    edges = [0.0, first]
    while edges[-1] < r_max:
        r = edges[-1]
        width = min((ratio - 1.0) * r, wave_cap * math.sqrt(r))
        edges.append(min(r + max(width, first), r_max))
    return np.asarray(edges)


def _composite_nodes(edges, order):
    x, w = _gauss_legendre(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (x + 1.0)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def radial_moment_quadrature(bra, ket, power=3, Z=1.0, rtol=1e-10, order=20,
                             max_refine=4, r_max=None):
    """int_0^inf r^power R_bra R_ket dr by composite Gauss-Legendre (lengths in a0).

    The panel set is halved until two successive rules (orders ``order`` and
    ``order + 8``) agree to ``rtol`` relative to the result, or to ``rtol``
    relative to int |integrand| for results that are essentially zero.
    Raises :class:`AccuracyError` if that does not happen within ``max_refine``
    halvings.
    """
    n, l = _nl(bra)
    n2, l2 = _nl(ket)
    nmax = max(n, n2)
    if r_max is None:
        # wavefunctions die off as exp(-Zr/n) beyond the outer turning point ~2n^2/Z
        r_max = (4.0 * n * nmax + 40.0 * nmax) / Z
    edges = _panel_edges(r_max, first=0.5 / Z, wave_cap=math.pi * math.sqrt(2.0 / Z))
    est = math.inf
    for _ in range(max_refine + 1):
        results = []
        for q in (order, order + 8):
            x, w = _composite_nodes(edges, q)
            f = x**power * radial_wavefunction((n, l), x, Z) * radial_wavefunction((n2, l2), x, Z)
            results.append((math.fsum(w * f), math.fsum(w * np.abs(f))))
        (lo_val, _), (hi_val, scale) = results
        est = abs(hi_val - lo_val)
        if est <= rtol * abs(hi_val) or est <= rtol * scale * 1e-3:
            return hi_val
        mids = 0.5 * (edges[:-1] + edges[1:])
        edges = np.sort(np.concatenate([edges, mids]))
    raise AccuracyError(
        f"radial quadrature for {(n, l)} -> {(n2, l2)} did not converge "
        f"(error estimate {est:.3e})", estimate=est)


def radial_integral_quadrature(n, l, n2, l2, Z=1.0, rtol=1e-10):
    """Direct numerical int r^3 R_nl R_n'l' dr; independent check of the closed form."""
    value_a0 = radial_moment_quadrature((n, l), (n2, l2), power=3, Z=Z, rtol=rtol)
    return RadialIntegral((n, l), (n2, l2), value_a0 * Z, Z)


# ---------------------------------------------------------------- energies

def energy_level(n, l, model=None):
    """Unperturbed energy of (n, l) in Hartree."""
    OrbitalState(n, l)
    model = model or EnergyModel.hydrogenic()
    n_eff = model.effective_n(n, l)
    return -(model.Z**2) / (2.0 * n_eff**2)

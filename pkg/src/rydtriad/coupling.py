"""Dipole-dipole interaction matrices over three-atom product bases.

For atoms i, j separated by R_ij along the unit vector u_ij the pair element is

    <a_i a_j| V_ij |a_i' a_j'> = R(a_i, a_i') R(a_j, a_j') / R_ij^3
                                 * [A_i . A_j - 3 (A_i . u_ij)(A_j . u_ij)]

in atomic units (e^2 / 4 pi eps0 = 1), with radial integrals R in a0 and
A-vectors from :mod:`rydtriad.angular`.  The dot products are bilinear (no
complex conjugation): each A already is a matrix element <bra| e_r |ket>.

Three degenerate manifolds are built for principal quantum number n:

* ``sp``  : |ns; np; g>, |np; ns; g>                (6 states)
* ``pd``  : |g; np; nd>, |g; nd; np>                (30 states)
* ``spd`` : the six orderings of (ns, np, nd)       (90 states)

Canonical basis order: orderings by permutation index (the identity
ordering first), then magnetic quantum numbers ascending, atom 1 slowest.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .angular import angular_vector_integral, selection_rule_allowed
from .constants import energy_from_hartree, length_to_bohr, ENERGY_UNITS
from .errors import DegeneracyError, ValidationError
from .hydrogenics import EnergyModel, OrbitalState, energy_level, radial_integral_closed

__all__ = [
    "GROUND",
    "Geometry",
    "ProductBasisState",
    "InteractionMatrix",
    "ShiftSpectrum",
    "closed_form_source",
    "pair_matrix_element",
    "build_subspace_basis",
    "assemble_interaction_matrix",
    "eigen_shifts",
    "shifts_physical",
    "subspace_spectrum",
    "manifold_coupling_ratio",
    "uncoupled_state_check",
    "write_matrix",
    "read_matrix",
]

GROUND = "g"
PAIRS = ((0, 1), (0, 2), (1, 2))
SUBSPACE_KINDS = ("sp", "pd", "spd")

RadialSource = Callable[[int, int, int, int], float]


def closed_form_source(Z=1.0) -> RadialSource:
    """Radial integrals in a0 from the exact closed form."""

    def source(n, l, n2, l2):
        return radial_integral_closed(n, l, n2, l2, Z=Z).bohr

    return source


_DEFAULT_SOURCE = closed_form_source()


# ---------------------------------------------------------------- geometry

@dataclass(frozen=True)
class Geometry:
    """Nuclear positions of atoms (1), (2), (3), stored in Bohr radii."""

    positions: np.ndarray

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        if pos.shape != (3, 3):
            raise ValueError(f"need exactly three 3-vectors, got shape {pos.shape}")
        object.__setattr__(self, "positions", pos)
        for i, j in PAIRS:
            if not np.linalg.norm(pos[j] - pos[i]) > 0:
                raise ValueError(f"atoms {i + 1} and {j + 1} coincide")

    @classmethod
    def from_positions(cls, positions, unit="a0"):
        return cls(length_to_bohr(np.asarray(positions, dtype=float), unit))

    @classmethod
    def collinear(cls, R, unit="a0", axis=(0.0, 0.0, 1.0), R23=None):
        """Atoms on a line: R_12 = R, R_23 = R23 (defaults to R)."""
        e = np.asarray(axis, dtype=float)
        e = e / np.linalg.norm(e)
        R12 = length_to_bohr(R, unit)
        R23 = R12 if R23 is None else length_to_bohr(R23, unit)
        return cls(np.array([0 * e, R12 * e, (R12 + R23) * e]))

    def pair(self, i, j):
        """(R_ij, u_ij) with u_ij pointing from nucleus i to nucleus j."""
        d = self.positions[j] - self.positions[i]
        R = float(np.linalg.norm(d))
        return R, d / R

    def angles(self, i, j):
        """Polar and azimuthal angles (alpha_ij, beta_ij) of u_ij."""
        _, u = self.pair(i, j)
        return float(np.arccos(np.clip(u[2], -1.0, 1.0))), float(np.arctan2(u[1], u[0]))

    def rotated(self, rotation):
        return Geometry(self.positions @ np.asarray(rotation, dtype=float).T)

    def scaled(self, factor):
        return Geometry(self.positions * factor)

    def to_dict(self):
        return {"unit": "a0", "positions": self.positions.tolist()}


# ------------------------------------------------------------------ bases

@dataclass(frozen=True)
class ProductBasisState:
    """Three-atom product state; ``GROUND`` marks an atom left in |g>."""

    orbitals: tuple

    def __post_init__(self):
        if len(self.orbitals) != 3:
            raise ValueError("a product state describes exactly three atoms")
        for o in self.orbitals:
            if o != GROUND and not isinstance(o, OrbitalState):
                raise ValueError(f"expected OrbitalState or GROUND, got {o!r}")

    @property
    def label(self):
        return "|" + "; ".join(o if o == GROUND else o.label for o in self.orbitals) + ">"

    def __str__(self):
        return self.label


_KIND_ORBITALS = {
    "sp": (0, 1, GROUND),
    "pd": (GROUND, 1, 2),
    "spd": (0, 1, 2),
}


def build_subspace_basis(kind, n):
    """Canonically ordered basis of the ``sp``, ``pd`` or ``spd`` manifold."""
    if kind not in _KIND_ORBITALS:
        raise ValueError(f"kind must be one of {SUBSPACE_KINDS}, got {kind!r}")
    if n < 3:
        raise ValueError("need n >= 3 so that s, p and d levels exist")
    template = _KIND_ORBITALS[kind]
    slots = [i for i, o in enumerate(template) if o != GROUND]
    ls = [template[i] for i in slots]
    orderings = []
    for perm in itertools.permutations(range(len(ls))):
        ordering = list(template)
        for slot, p in zip(slots, perm):
            ordering[slot] = ls[p]
        if ordering not in orderings:
            orderings.append(ordering)
    basis = []
    for ordering in orderings:
        ranges = [range(-l, l + 1) if l != GROUND else [None] for l in ordering]
        for ms in itertools.product(*ranges):
            basis.append(ProductBasisState(tuple(
                GROUND if l == GROUND else OrbitalState(n, l, m)
                for l, m in zip(ordering, ms))))
    return basis


# ---------------------------------------------------------- matrix elements

def pair_matrix_element(bra_i, bra_j, ket_i, ket_j, R, u, radial_source=None):
    """<bra_i bra_j| V_ij |ket_i ket_j> in Hartree for separation R (a0) along u."""
    if R <= 0:
        raise ValueError("pair distance must be positive")
    if not (selection_rule_allowed(bra_i.l, bra_i.m, ket_i.l, ket_i.m)
            and selection_rule_allowed(bra_j.l, bra_j.m, ket_j.l, ket_j.m)):
        return 0j
    source = radial_source or _DEFAULT_SOURCE
    radial = (source(bra_i.n, bra_i.l, ket_i.n, ket_i.l)
              * source(bra_j.n, bra_j.l, ket_j.n, ket_j.l))
    Ai = angular_vector_integral(bra_i.l, bra_i.m, ket_i.l, ket_i.m).value
    Aj = angular_vector_integral(bra_j.l, bra_j.m, ket_j.l, ket_j.m).value
    u = np.asarray(u, dtype=float)
    angular = Ai @ Aj - 3.0 * (Ai @ u) * (Aj @ u)
    return complex(radial / R**3 * angular)


@dataclass
class InteractionMatrix:
    """V_dd restricted to a product basis, in Hartree.

    For ``sp`` and ``pd`` manifolds a single scalar prefactor
    R^2 / R_ij^3 factors out and ``dimensionless_part`` holds the remaining
    angular matrix (A_sp or A_pd).
    """

    basis: list
    entries: np.ndarray
    kind: Optional[str] = None
    prefactor: Optional[float] = None
    dimensionless_part: Optional[np.ndarray] = None

    @property
    def labels(self):
        return [b.label for b in self.basis]

    def hermiticity_error(self):
        scale = max(np.abs(self.entries).max(), np.finfo(float).tiny)
        return float(np.abs(self.entries - self.entries.conj().T).max() / scale)


def _infer_kind(basis):
    excited = {tuple(o == GROUND for o in b.orbitals) for b in basis}
    if len(excited) != 1:
        return None
    ls = {tuple(sorted(o.l for o in b.orbitals if o != GROUND)) for b in basis}
    for kind, template in _KIND_ORBITALS.items():
        t_ground = tuple(o == GROUND for o in template)
        t_ls = tuple(sorted(o for o in template if o != GROUND))
        if excited == {t_ground} and ls == {t_ls}:
            return kind
    return None


def _state_energy(state, model):
    return sum(energy_level(o.n, o.l, model) for o in state.orbitals if o != GROUND)


def _check_degenerate(basis, model):
    energies = np.array([_state_energy(b, model) for b in basis])
    ground_counts = {sum(o == GROUND for o in b.orbitals) for b in basis}
    spread = energies.max() - energies.min()
    if len(ground_counts) > 1 or spread > 1e-12 * np.abs(energies).max():
        raise DegeneracyError(
            f"basis is not degenerate (energy spread {spread:.3e} Hartree); "
            "first-order shifts are only meaningful inside a degenerate manifold")


def assemble_interaction_matrix(basis: Sequence[ProductBasisState], geometry: Geometry,
                                radial_source=None, energy_model: EnergyModel = None,
                                check_degeneracy=True):
    """Sum of V_12 + V_13 + V_23 over ``basis``.

    Atoms left in |g> do not interact; the atom outside a given pair must be in
    the same state in bra and ket.
    """
    basis = list(basis)
    if check_degeneracy:
        _check_degenerate(basis, energy_model or EnergyModel.hydrogenic())
    source = radial_source or _DEFAULT_SOURCE
    cache = {}

    def radial(n, l, n2, l2):
        key = (n, l, n2, l2)
        if key not in cache:
            cache[key] = source(n, l, n2, l2)
        return cache[key]

    pair_geom = {p: geometry.pair(*p) for p in PAIRS}
    dim = len(basis)
    H = np.zeros((dim, dim), dtype=complex)
    for a, bra in enumerate(basis):
        for b, ket in enumerate(basis):
            total = 0j
            for i, j in PAIRS:
                k = 3 - i - j
                if bra.orbitals[k] != ket.orbitals[k]:
                    continue
                oi, oj = bra.orbitals[i], bra.orbitals[j]
                ki, kj = ket.orbitals[i], ket.orbitals[j]
                if GROUND in (oi, oj, ki, kj):
                    continue
                R, u = pair_geom[(i, j)]
                total += pair_matrix_element(oi, oj, ki, kj, R, u, radial)
            H[a, b] = total
    kind = _infer_kind(basis)
    prefactor = dimless = None
    if kind in ("sp", "pd"):
        first = basis[0].orbitals
        i, j = [x for x in range(3) if first[x] != GROUND]
        oi, oj = first[i], first[j]
        R, _ = pair_geom[(i, j)]
        prefactor = radial(oi.n, oi.l, oj.n, oj.l) ** 2 / R**3
        dimless = H / prefactor
    return InteractionMatrix(basis, H, kind, prefactor, dimless)


# ---------------------------------------------------------------- spectra

@dataclass
class ShiftSpectrum:
    """Sorted eigenvalues of an interaction matrix.

    ``eigenvalues`` are in ``unit``; ``dimensionless`` (sp and pd only) are the
    eigenvalues of the angular matrix with the prefactor divided out.
    """

    kind: Optional[str]
    eigenvalues: np.ndarray
    unit: str = "hartree"
    dimensionless: Optional[np.ndarray] = None
    prefactor: Optional[float] = None
    meta: dict = field(default_factory=dict)

    def to(self, unit):
        return ShiftSpectrum(self.kind, energy_from_hartree(self._as_hartree(), unit), unit,
                             self.dimensionless, self.prefactor, dict(self.meta))

    def _as_hartree(self):
        return self.eigenvalues / energy_from_hartree(1.0, self.unit)

    @property
    def unit_conversions(self):
        h = self._as_hartree()
        return {u: energy_from_hartree(h, u) for u in ENERGY_UNITS}

    def nonzero_mask(self, rel=1e-8):
        """|lambda| > rel * spectral norm counts as a genuine (nonzero) shift."""
        norm = np.abs(self.eigenvalues).max() if len(self.eigenvalues) else 0.0
        return np.abs(self.eigenvalues) > rel * norm

    def magnitude_range(self, rel=1e-8):
        """(min, max) of nonzero |eigenvalue|, in ``unit``."""
        mags = np.abs(self.eigenvalues[self.nonzero_mask(rel)])
        return float(mags.min()), float(mags.max())

    def min_magnitude_eigenvalue(self, rel=1e-8):
        """Signed nonzero eigenvalue of smallest magnitude (the weakest blockade)."""
        vals = self.eigenvalues[self.nonzero_mask(rel)]
        return float(vals[np.argmin(np.abs(vals))])

    def to_dict(self):
        d = {"kind": self.kind, "unit": self.unit,
             "eigenvalues": [float(v) for v in self.eigenvalues]}
        if self.dimensionless is not None:
            d["dimensionless"] = [float(v) for v in self.dimensionless]
        if self.prefactor is not None:
            d["prefactor_hartree"] = float(self.prefactor)
        if self.meta:
            d["meta"] = self.meta
        return d

    @classmethod
    def from_dict(cls, d):
        dimless = d.get("dimensionless")
        return cls(d.get("kind"), np.asarray(d["eigenvalues"], dtype=float), d.get("unit", "hartree"),
                   None if dimless is None else np.asarray(dimless, dtype=float),
                   d.get("prefactor_hartree"), dict(d.get("meta", {})))


def eigen_shifts(matrix, herm_tol=1e-12):
    """Full eigenvalue set of a Hermitian interaction matrix (Hartree, ascending)."""
    if isinstance(matrix, InteractionMatrix):
        H, kind, pref, dimless = matrix.entries, matrix.kind, matrix.prefactor, matrix.dimensionless_part
    else:
        H, kind, pref, dimless = np.asarray(matrix), None, None, None
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValidationError(f"need a square matrix, got shape {H.shape}")
    scale = max(np.abs(H).max(), np.finfo(float).tiny)
    err = np.abs(H - H.conj().T).max() / scale
    if err > herm_tol:
        raise ValidationError(f"matrix is not Hermitian (relative defect {err:.2e})")
    vals = np.linalg.eigvalsh(H)
    dim_vals = None if dimless is None else np.linalg.eigvalsh(dimless)
    return ShiftSpectrum(kind, vals, "hartree", dim_vals, pref)


def shifts_physical(spectrum: ShiftSpectrum, unit):
    """Same spectrum expressed in ``unit`` ('hartree', 'cm-1' or 'MHz')."""
    return spectrum.to(unit)


def subspace_spectrum(kind, n, geometry, radial_source=None, energy_model=None):
    """Build, assemble and diagonalize one manifold in a single call."""
    basis = build_subspace_basis(kind, n)
    return eigen_shifts(assemble_interaction_matrix(basis, geometry, radial_source, energy_model))


# ------------------------------------------------------ uncoupled manifolds

def _manifold(first, second):
    (n1, l1), (n2, l2) = first, second
    return [(OrbitalState(n1, l1, m1), OrbitalState(n2, l2, m2))
            for m1 in range(-l1, l1 + 1) for m2 in range(-l2, l2 + 1)]


def manifold_coupling_ratio(first, second, R, u, radial_source=None):
    """Largest |<first; second| V |second; first>| relative to the sp coupling scale.

    ``first`` and ``second`` are (n, l) pairs; all magnetic sublevels are
    scanned.  The scale is (R_{ns}^{np})^2 / R^3 with n taken from ``first``.
    """
    source = radial_source or _DEFAULT_SOURCE
    n = first[0]
    scale = abs(source(n, 0, n, 1)) ** 2 / R**3
    worst = 0.0
    for bi, bj in _manifold(first, second):
        for ki, kj in _manifold(second, first):
            worst = max(worst, abs(pair_matrix_element(bi, bj, ki, kj, R, u, source)))
    return worst / scale


def uncoupled_state_check(first, second, R, u, radial_source=None, tol=1e-14):
    """True iff V_dd does not connect |first; second> with |second; first>."""
    return manifold_coupling_ratio(first, second, R, u, radial_source) < tol


# ------------------------------------------------------------- text dumps

_MATRIX_MAGIC = "# rydtriad complex matrix v1"


def write_matrix(matrix: InteractionMatrix, fh, unit="hartree"):
    """Plain-text dump: header lines, one basis label per line, then rows.

    Each row holds ``dim`` entries written as ``re im`` pairs with full
    double-precision repr, separated by single spaces.
    """
    H = energy_from_hartree(matrix.entries, unit)
    lines = [_MATRIX_MAGIC, f"# kind: {matrix.kind}", f"# unit: {unit}", f"# dim: {len(matrix.basis)}"]
    lines += [f"# basis: {label}" for label in matrix.labels]
    for row in H:
        lines.append(" ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in row))
    fh.write("\n".join(lines) + "\n")


def read_matrix(fh):
    """Inverse of :func:`write_matrix`; returns (labels, entries, header dict)."""
    header, labels, rows = {}, [], []
    for line in fh:
        line = line.rstrip("\n")
        if not line:
            continue
        if line.startswith("# basis: "):
            labels.append(line[len("# basis: "):])
        elif line.startswith("# ") and ": " in line:
            key, val = line[2:].split(": ", 1)
            header[key] = val
        elif line.startswith("#"):
            continue
        else:
            nums = [float(t) for t in line.split()]
            rows.append([complex(nums[k], nums[k + 1]) for k in range(0, len(nums), 2)])
    M = np.array(rows, dtype=complex)
    if M.shape != (len(labels), len(labels)):
        raise ValidationError("matrix dump is inconsistent with its basis header")
    return labels, M, header

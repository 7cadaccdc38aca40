"""Batch command-line front end.

    rydtriad radial N L N2 L2 [--method closed|quadrature] [--Z Z]
    rydtriad shifts   --config run.json
    rydtriad blockade --config run.json
    rydtriad gatesim  --config run.json [--protocol toffoli|ccphase]
    rydtriad matrix   --config run.json --subspace sp|pd|spd

All subcommands take ``--output PATH`` (default stdout) and
``--format json|csv``.  Exit status: 0 success, 2 invalid input or
configuration, 3 computation error (capacity, accuracy, resonance alarm,
degeneracy violation).

Config file (JSON, ``schema_version`` 1)::

    {
      "schema_version": 1,
      "species": {"Z": 1.0, "energy_model": "quantum-defect", "defects": "rubidium"},
      "n": 42,
      "geometry": {"unit": "um", "positions": [[0, 0, 0], [0, 0, 5], [0, 0, 10]]},
      "subspaces": ["sp", "pd", "spd"],
      "blockade": {"n_window": 4, "threshold": 0.1, "resonance_factor": 10.0,
                   "rabi_ratio": 0.05, "rabi_reference": "sp"},
      "gate": {"protocol": "toffoli", "rabi_mhz": 0.1, "mode": "effective-diagonal",
               "shift_source": "computed"},
      "output": {"format": "json", "path": null}
    }

``species.defects`` is either a map l -> delta_l or the string "rubidium"
(packaged table).  ``gate.shift_source`` is "computed" (weakest shift of each
manifold from this config), a path to a file written by ``shifts``, or absent
when ``gate.shifts_mhz`` gives {"sp", "pd", "spd"} explicitly.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .blockade import check_negligibility
from .constants import energy_from_hartree
from .coupling import (SUBSPACE_KINDS, Geometry, ShiftSpectrum, assemble_interaction_matrix,
                       build_subspace_basis, eigen_shifts, write_matrix)
from .errors import (AccuracyError, CapacityError, ConfigurationError, DegeneracyError,
                     ResonanceAlarm, ValidationError)
from .gatesim import InteractionSpec, run_ccphase_protocol, run_toffoli_protocol
from .hydrogenics import EnergyModel, radial_integral_closed, radial_integral_quadrature

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VALIDATION, EXIT_COMPUTATION = 0, 2, 3


@dataclass
class RunConfig:
    n: int
    geometry: Geometry
    energy_model: EnergyModel
    Z: float = 1.0
    subspaces: tuple = SUBSPACE_KINDS
    blockade: dict = field(default_factory=dict)
    gate: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    @classmethod
    def from_dict(cls, d, base_dir=Path(".")):
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ConfigurationError(f"schema_version must be {SCHEMA_VERSION}")
        try:
            n = int(d["n"])
            geo = d["geometry"]
            unit = geo["unit"]
            positions = geo["positions"]
        except KeyError as e:
            raise ConfigurationError(f"missing config key {e}") from None
        if n < 4:
            raise ConfigurationError("n must be >= 4")
        if len(positions) != 3 or any(len(p) != 3 for p in positions):
            raise ConfigurationError("geometry.positions must list exactly three 3-vectors")
        try:
            geometry = Geometry.from_positions(positions, unit)
        except ValueError as e:
            raise ConfigurationError(str(e)) from None
        species = d.get("species", {})
        Z = float(species.get("Z", 1.0))
        kind = species.get("energy_model", "hydrogenic")
        defects = species.get("defects", {})
        source = ""
        if defects == "rubidium":
            rb = EnergyModel.rubidium()
            defects, source = rb.defects, rb.source
        model = EnergyModel(kind, Z, defects, source)
        subspaces = tuple(d.get("subspaces", SUBSPACE_KINDS))
        for s in subspaces:
            if s not in SUBSPACE_KINDS:
                raise ConfigurationError(f"unknown subspace {s!r}")
        return cls(n, geometry, model, Z, subspaces, dict(d.get("blockade", {})),
                   dict(d.get("gate", {})), dict(d.get("output", {})), Path(base_dir))

    @classmethod
    def load(cls, path):
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"cannot read config {path}: {e}") from None
        return cls.from_dict(data, path.parent)


# ------------------------------------------------------------------ output

def _dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _cell(v):
    if isinstance(v, np.generic):
        v = v.item()
    return repr(v) if isinstance(v, float) else v


def _dump_csv(rows):
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(v) for k, v in row.items()})
    return buf.getvalue()


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _fmt(args, cfg=None):
    fmt = args.format or (cfg.output.get("format") if cfg else None) or "json"
    if fmt not in ("json", "csv"):
        raise ConfigurationError(f"unknown output format {fmt!r}")
    return fmt


def _out(args, cfg=None):
    return args.output or (cfg.output.get("path") if cfg else None)


# ---------------------------------------------------------------- commands

def cmd_radial(args):
    if abs(args.l - args.l2) != 1:
        warnings.warn(f"|l - l'| = {abs(args.l - args.l2)} != 1: not a dipole integral, "
                      "unused by the interaction pipeline", stacklevel=1)
    try:
        if args.method == "closed":
            ri = radial_integral_closed(args.n, args.l, args.n2, args.l2, Z=args.Z)
        else:
            ri = radial_integral_quadrature(args.n, args.l, args.n2, args.l2, Z=args.Z)
    except ValueError as e:
        raise ValidationError(str(e)) from None
    row = {"n": args.n, "l": args.l, "n2": args.n2, "l2": args.l2, "method": args.method,
           "Z": args.Z, "value_a": ri.value, "value_a0": ri.bohr}
    text = _dump_json(row) if _fmt(args) == "json" else _dump_csv([row])
    _emit(text, _out(args))


def compute_spectra(cfg):
    spectra = {}
    for kind in cfg.subspaces:
        basis = build_subspace_basis(kind, cfg.n)
        source = None
        if cfg.Z != 1.0:
            from .coupling import closed_form_source
            source = closed_form_source(cfg.Z)
        spectra[kind] = eigen_shifts(assemble_interaction_matrix(basis, cfg.geometry, source))
    return spectra


def _spectra_payload(cfg, spectra):
    out = {}
    for kind, s in spectra.items():
        entry = s.to_dict()
        conv = s.unit_conversions
        entry["cm-1"] = [float(v) for v in conv["cm-1"]]
        entry["MHz"] = [float(v) for v in conv["MHz"]]
        lo, hi = s.to("MHz").magnitude_range()
        entry["nonzero_range_MHz"] = [lo, hi]
        entry["n_nonzero"] = int(s.nonzero_mask().sum())
        out[kind] = entry
    return {"schema_version": SCHEMA_VERSION, "kind": "shifts", "n": cfg.n,
            "geometry": cfg.geometry.to_dict(), "spectra": out}


def cmd_shifts(args):
    cfg = RunConfig.load(args.config)
    spectra = compute_spectra(cfg)
    if _fmt(args, cfg) == "json":
        text = _dump_json(_spectra_payload(cfg, spectra))
    else:
        rows = []
        for kind, s in spectra.items():
            conv = s.unit_conversions
            for k in range(len(s.eigenvalues)):
                rows.append({"subspace": kind, "index": k,
                             "hartree": float(conv["hartree"][k]), "cm-1": float(conv["cm-1"][k]),
                             "MHz": float(conv["MHz"][k]),
                             "dimensionless": (float(s.dimensionless[k])
                                               if s.dimensionless is not None else "")})
        text = _dump_csv(rows)
    _emit(text, _out(args, cfg))


def cmd_matrix(args):
    cfg = RunConfig.load(args.config)
    basis = build_subspace_basis(args.subspace, cfg.n)
    m = assemble_interaction_matrix(basis, cfg.geometry)
    buf = io.StringIO()
    write_matrix(m, buf, unit=args.unit)
    _emit(buf.getvalue(), _out(args, cfg))


def cmd_blockade(args):
    cfg = RunConfig.load(args.config)
    opts = cfg.blockade
    fmt = _fmt(args, cfg)
    alarm = None
    try:
        report = check_negligibility(
            cfg.n, cfg.geometry, cfg.energy_model,
            threshold=float(opts.get("threshold", 0.1)),
            n_window=int(opts.get("n_window", 4)),
            resonance_factor=float(opts.get("resonance_factor", 10.0)),
            rabi_ratio=float(opts.get("rabi_ratio", 0.05)),
            rabi_reference=opts.get("rabi_reference", "sp"))
    except ResonanceAlarm as e:
        if e.report is None:
            raise
        alarm, report = e, e.report
    text = _dump_json(report.to_dict()) if fmt == "json" else _dump_csv(report.rows())
    _emit(text, _out(args, cfg))
    if alarm is not None:
        raise alarm
    if not report.passed:
        print(f"negligibility condition violated (margin sums {report.margin_sums})", file=sys.stderr)
        return EXIT_COMPUTATION
    return EXIT_OK


def load_shift_file(path):
    """Spectra written by ``shifts`` (JSON or CSV) -> {kind: ShiftSpectrum}."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        return {k: ShiftSpectrum.from_dict(v) for k, v in data["spectra"].items()}
    rows = list(csv.DictReader(io.StringIO(text)))
    out = {}
    for kind in dict.fromkeys(r["subspace"] for r in rows):
        mine = sorted((r for r in rows if r["subspace"] == kind), key=lambda r: int(r["index"]))
        vals = np.array([float(r["hartree"]) for r in mine])
        dim = [r["dimensionless"] for r in mine]
        out[kind] = ShiftSpectrum(kind, vals, "hartree",
                                  np.array([float(v) for v in dim]) if all(dim) else None)
    return out


def gate_interaction(cfg):
    gate = cfg.gate
    mode = gate.get("mode", "effective-diagonal")
    if "shifts_mhz" in gate:
        s = gate["shifts_mhz"]
        try:
            return InteractionSpec.from_mhz(float(s["sp"]), float(s["pd"]), float(s["spd"]), mode)
        except KeyError as e:
            raise ConfigurationError(f"gate.shifts_mhz lacks {e}") from None
    source = gate.get("shift_source", "computed")
    if source == "computed":
        spectra = compute_spectra(RunConfig(cfg.n, cfg.geometry, cfg.energy_model, cfg.Z, SUBSPACE_KINDS))
    else:
        path = Path(source)
        if not path.is_absolute():
            path = cfg.base_dir / path
        try:
            spectra = load_shift_file(path)
        except (OSError, KeyError, ValueError) as e:
            raise ConfigurationError(f"cannot read shift source {path}: {e}") from None
    missing = set(SUBSPACE_KINDS) - set(spectra)
    if missing:
        raise ConfigurationError(f"shift source lacks subspaces {sorted(missing)}")
    return InteractionSpec.from_spectra(spectra, mode)


def cmd_gatesim(args):
    cfg = RunConfig.load(args.config)
    protocol = args.protocol or cfg.gate.get("protocol", "toffoli")
    rabi_mhz = float(cfg.gate.get("rabi_mhz", 0.1))
    if rabi_mhz <= 0:
        raise ConfigurationError("gate.rabi_mhz must be positive")
    interaction = gate_interaction(cfg)
    rabi = 2 * math.pi * rabi_mhz
    if protocol == "toffoli":
        result = run_toffoli_protocol(rabi, interaction)
    elif protocol == "ccphase":
        result = run_ccphase_protocol(rabi, interaction)
    else:
        raise ConfigurationError(f"unknown protocol {protocol!r}")
    payload = {"schema_version": SCHEMA_VERSION, "rabi_MHz": rabi_mhz,
               "interaction": interaction.to_dict(), **result.to_dict()}
    if _fmt(args, cfg) == "json":
        text = _dump_json(payload)
    else:
        keys = ("protocol", "fidelity_raw", "fidelity", "worst_overlap", "leakage", "unitarity_error")
        text = _dump_csv([{"metric": k, "value": payload[k]} for k in keys])
    _emit(text, _out(args, cfg))


# ------------------------------------------------------------------ parser

def build_parser():
    p = argparse.ArgumentParser(prog="rydtriad", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--output", "-o", help="output file (default: stdout)")
        sp.add_argument("--format", choices=("json", "csv"))

    r = sub.add_parser("radial", help="radial dipole integral in units of a0/Z")
    for name in ("n", "l", "n2", "l2"):
        r.add_argument(name, type=int)
    r.add_argument("--method", choices=("closed", "quadrature"), default="closed")
    r.add_argument("--Z", type=float, default=1.0)
    common(r, config=False)
    r.set_defaults(func=cmd_radial)

    s = sub.add_parser("shifts", help="first-order shift spectra of the sp, pd, spd manifolds")
    common(s)
    s.set_defaults(func=cmd_shifts)

    b = sub.add_parser("blockade", help="second-order negligibility and Rabi-frequency bound")
    common(b)
    b.set_defaults(func=cmd_blockade)

    g = sub.add_parser("gatesim", help="simulate the Toffoli or ccphase protocol")
    common(g)
    g.add_argument("--protocol", choices=("toffoli", "ccphase"))
    g.set_defaults(func=cmd_gatesim)

    m = sub.add_parser("matrix", help="dump an interaction matrix as plain text")
    common(m)
    m.add_argument("--subspace", choices=SUBSPACE_KINDS, required=True)
    m.add_argument("--unit", choices=("hartree", "cm-1", "MHz"), default="hartree")
    m.set_defaults(func=cmd_matrix)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        status = args.func(args)
    except (ConfigurationError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (CapacityError, AccuracyError, ResonanceAlarm, DegeneracyError) as e:
        print(f"computation error: {e}", file=sys.stderr)
        return EXIT_COMPUTATION
    return status or EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

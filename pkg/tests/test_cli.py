import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from rydtriad.cli import main

CONFIG = {
    "schema_version": 1,
    "species": {"Z": 1.0, "energy_model": "quantum-defect", "defects": "rubidium"},
    "n": 42,
    "geometry": {"unit": "um", "positions": [[0, 0, 0], [0, 0, 5], [0, 0, 10]]},
    "subspaces": ["sp", "pd", "spd"],
    "gate": {"protocol": "toffoli", "rabi_mhz": 0.1, "mode": "effective-diagonal",
             "shift_source": "computed"},
}


def write_config(tmp_path, **over):
    cfg = json.loads(json.dumps(CONFIG))
    for k, v in over.items():
        cfg[k] = v
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_radial(capsys):
    code, out, _ = run(["radial", "42", "0", "42", "1"], capsys)
    assert code == 0
    assert abs(abs(json.loads(out)["value_a0"]) - 2645.25) < 0.01


def test_radial_quadrature_csv_and_z(capsys):
    code, out, _ = run(["radial", "5", "1", "6", "2", "--method", "quadrature", "--Z", "2", "--format", "csv"],
                       capsys)
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert float(row["value_a0"]) == pytest.approx(float(row["value_a"]) / 2)


def test_radial_warns_off_dipole(capsys):
    with pytest.warns(UserWarning):
        code, _, _ = run(["radial", "3", "0", "3", "2"], capsys)
    assert code == 0


def test_radial_invalid_state(capsys):
    code, _, err = run(["radial", "3", "3", "4", "2"], capsys)
    assert code == 2 and "error" in err


def test_radial_capacity(capsys, monkeypatch):
    import rydtriad.hydrogenics as hy
    monkeypatch.setattr(hy, "DEFAULT_MAX_BITS", 64)
    monkeypatch.setattr(hy.radial_integral_closed, "__defaults__", (1.0, 64))
    code, _, _ = run(["radial", "40", "0", "41", "1"], capsys)
    assert code == 3


def test_shifts_json_deterministic(tmp_path, capsys):
    cfg = write_config(tmp_path)
    _, a, _ = run(["shifts", "--config", cfg], capsys)
    _, b, _ = run(["shifts", "--config", cfg], capsys)
    assert a == b
    spectra = json.loads(a)["spectra"]
    lo, hi = spectra["sp"]["nonzero_range_MHz"]
    assert 17 < lo < 19 and 35 < hi < 38


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_shifts_feed_gatesim(tmp_path, capsys, fmt):
    cfg = write_config(tmp_path)
    shifts = tmp_path / f"shifts.{fmt}"
    assert main(["shifts", "--config", cfg, "--format", fmt, "--output", str(shifts)]) == 0
    _, direct, _ = run(["gatesim", "--config", cfg], capsys)
    gate = dict(CONFIG["gate"], shift_source=shifts.name)
    cfg2 = write_config(tmp_path, gate=gate)
    code, via_file, _ = run(["gatesim", "--config", cfg2], capsys)
    assert code == 0
    assert json.loads(via_file)["interaction"] == json.loads(direct)["interaction"]
    assert json.loads(via_file)["fidelity"] >= 0.99


def test_gatesim_explicit_shifts_ccphase(tmp_path, capsys):
    gate = {"rabi_mhz": 0.01, "shifts_mhz": {"sp": 100.0, "pd": 100.0, "spd": 100.0}}
    cfg = write_config(tmp_path, gate=gate)
    code, out, _ = run(["gatesim", "--config", cfg, "--protocol", "ccphase", "--format", "csv"], capsys)
    assert code == 0
    rows = {r["metric"]: r["value"] for r in csv.DictReader(io.StringIO(out))}
    assert 1 - float(rows["fidelity"]) <= 1e-4


def test_blockade_pass_and_csv(tmp_path, capsys):
    cfg = write_config(tmp_path)
    code, out, _ = run(["blockade", "--config", cfg, "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 646
    assert all(not r["margin"].startswith("np.") for r in rows)


def test_blockade_hydrogenic_alarm(tmp_path, capsys):
    cfg = write_config(tmp_path, species={"energy_model": "hydrogenic"})
    out_path = tmp_path / "report.json"
    code, _, err = run(["blockade", "--config", cfg, "--output", str(out_path)], capsys)
    assert code == 3
    report = json.loads(out_path.read_text())
    assert report["summary"]["n_resonant"] > 0


def test_missing_f_defect_is_config_error(tmp_path, capsys):
    species = {"energy_model": "quantum-defect", "defects": {"0": 3.13, "1": 2.65, "2": 1.35}}
    cfg = write_config(tmp_path, species=species)
    code, _, err = run(["blockade", "--config", cfg], capsys)
    assert code == 2


@pytest.mark.parametrize("patch", [
    {"schema_version": 99},
    {"geometry": {"positions": [[0, 0, 0], [0, 0, 5], [0, 0, 10]]}},
    {"geometry": {"unit": "um", "positions": [[0, 0, 0], [0, 0, 0], [0, 0, 10]]}},
    {"geometry": {"unit": "um", "positions": [[0, 0, 0], [0, 0, 5]]}},
    {"subspaces": ["sd"]},
])
def test_bad_configs(tmp_path, capsys, patch):
    cfg = write_config(tmp_path, **patch)
    code, _, err = run(["shifts", "--config", cfg], capsys)
    assert code == 2 and err


def test_missing_config_file(tmp_path, capsys):
    code, _, _ = run(["shifts", "--config", str(tmp_path / "nope.json")], capsys)
    assert code == 2


def test_matrix_dump(tmp_path, capsys):
    from rydtriad.coupling import read_matrix
    cfg = write_config(tmp_path)
    code, out, _ = run(["matrix", "--config", cfg, "--subspace", "sp", "--unit", "MHz"], capsys)
    assert code == 0
    labels, M, header = read_matrix(io.StringIO(out))
    assert len(labels) == 6 and header["unit"] == "MHz"
    ev = np.sort(np.abs(np.linalg.eigvalsh(M)))
    assert ev[-1] / ev[0] == pytest.approx(2.0)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rydtriad", "radial", "2", "0", "2", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value_a0"] == pytest.approx(-3 * np.sqrt(3), rel=1e-12)

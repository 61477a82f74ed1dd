"""Command-line workflows: artifacts, reproducibility, exit codes."""

import csv
import json
import os

import pytest

from weberatom.beams import BeamSpec, calibrate_amplitude, find_um
from weberatom.cli import main

TRAJ_HEADER = ["atom_id", "t", "x", "y", "z", "vx", "vy", "vz",
               "theta_d", "A_atomic", "Kx_uK", "Kyz_uK"]


def read_csv(path):
    with open(path, newline="") as handle:
        return list(csv.reader(handle))


def test_field_map_artifacts(tmp_path):
    out = str(tmp_path / "fm")
    assert main(["field-map", "--out", out, "--resolution", "16",
                 "--window", "30.0"]) == 0
    rows = read_csv(os.path.join(out, "field_map.csv"))
    assert rows[0] == ["x_lambda", "y_lambda", "intensity_W_cm2",
                       "re_psi", "im_psi"]
    assert len(rows) == 1 + 16 * 16
    # row-major: x varies fastest, y constant within a stripe
    assert rows[1][1] == rows[2][1]
    assert rows[1][0] != rows[2][0]
    assert all(r[4] == "0.0" for r in rows[1:])
    # cells carry full round-trip precision
    for cell in rows[7][:4]:
        assert repr(float(cell)) == cell

    meta = json.load(open(os.path.join(out, "run_metadata.json")))
    assert meta["backend"] in ("cython", "python")
    assert float(meta["calibration_scale"]) == pytest.approx(
        calibrate_amplitude(BeamSpec()), rel=1e-12)
    assert meta["config"]["beam"]["irradiance"] == "1.725"


def test_um_curve_artifact(tmp_path):
    out = str(tmp_path / "um")
    assert main(["um-curve", "--out", out, "--a-min", "0.0",
                 "--a-max", "2.0", "--a-step", "1.0"]) == 0
    rows = read_csv(os.path.join(out, "um_curve.csv"))
    assert rows[0] == ["a", "u_M"]
    assert [r[0] for r in rows[1:]] == ["0.0", "1.0", "2.0"]
    ums = [float(r[1]) for r in rows[1:]]
    assert ums == sorted(ums) and ums[0] < ums[-1]
    # bitwise identical to the library call
    assert float(rows[1][1]) == find_um(BeamSpec(order_a=0.0))


SIM_CONF = """
[cloud]
n_atoms = 4
seed = 11

[sim]
t_max = 20000.0

[output]
cadence = 5000.0
directory = {out}
"""


def write_conf(tmp_path, name, out_name, extra=""):
    path = tmp_path / name
    path.write_text(SIM_CONF.format(out=tmp_path / out_name) + extra)
    return str(path)


def test_simulate_artifacts_and_reruns_byte_identical(tmp_path):
    conf1 = write_conf(tmp_path, "a.conf", "run1")
    conf2 = write_conf(tmp_path, "b.conf", "run2")
    assert main(["simulate", "--config", conf1, "--threads", "1"]) == 0
    assert main(["simulate", "--config", conf2, "--threads", "2"]) == 0

    t1 = (tmp_path / "run1" / "trajectories.csv").read_bytes()
    t2 = (tmp_path / "run2" / "trajectories.csv").read_bytes()
    assert t1 == t2  # same seed, different thread count
    s1 = (tmp_path / "run1" / "summary.json").read_bytes()
    assert s1 == (tmp_path / "run2" / "summary.json").read_bytes()

    rows = read_csv(tmp_path / "run1" / "trajectories.csv")
    assert rows[0] == TRAJ_HEADER
    ids = sorted({r[0] for r in rows[1:]})
    assert ids == ["0", "1", "2", "3"]
    assert rows[1][1] == "0.0" and rows[2][1] == "5000.0"
    for cell in rows[3][1:]:
        assert repr(float(cell)) == cell

    summary = json.loads(s1)
    assert summary["n_atoms"] == 4 and summary["failures"] == []
    assert sum(summary["classes"].values()) == 4


def test_seed_override_lands_in_metadata(tmp_path):
    conf = write_conf(tmp_path, "c.conf", "run3")
    assert main(["simulate", "--config", conf, "--seed", "99"]) == 0
    meta = json.load(open(tmp_path / "run3" / "run_metadata.json"))
    assert meta["seed"] == 99
    assert meta["config"]["cloud"]["seed"] == "99"


def test_validate_passes(tmp_path):
    out = str(tmp_path / "val")
    assert main(["validate", "--out", out]) == 0
    report = (tmp_path / "val" / "validate_report.txt").read_text()
    assert "PASS field-synthesis" in report
    assert "FAIL" not in report


def test_validate_failure_exits_two(tmp_path, monkeypatch):
    import weberatom.spectrum as spectrum

    monkeypatch.setattr(spectrum, "scalar_psi_spectrum",
                        lambda *a, **k: 1.0 + 0.0j)
    out = str(tmp_path / "val2")
    assert main(["validate", "--out", out]) == 2
    assert "FAIL field-synthesis" in (tmp_path / "val2" /
                                      "validate_report.txt").read_text()


def test_usage_errors_exit_one(tmp_path):
    assert main(["um-curve", "--out", str(tmp_path / "x"),
                 "--a-step", "0.0"]) == 1
    assert main(["no-such-command"]) == 1
    assert main([]) == 1
    assert main(["simulate", "--config", str(tmp_path / "missing.conf")]) == 1


def test_config_errors_exit_one(tmp_path):
    bad = tmp_path / "bad.conf"
    bad.write_text("[beam]\nirradiancee = 2.0\n")
    assert main(["field-map", "--config", str(bad),
                 "--out", str(tmp_path / "y")]) == 1


def test_runtime_failure_exits_three(tmp_path):
    dead = tmp_path / "dead.conf"
    dead.write_text("[beam]\namp_te = 0j\namp_tm = 0j\n")
    assert main(["field-map", "--config", str(dead),
                 "--out", str(tmp_path / "z")]) == 3

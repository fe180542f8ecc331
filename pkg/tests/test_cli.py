from __future__ import annotations

import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from vanvleck.cli import main, parse_scenario, serialize_scenario


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def _free_config(**extra):
    cfg = {
        "model": {"tag": "free_particle", "params": {"mass": 1.0}},
        "x_a": [0.0],
        "x_b": [1.0],
        "t_b": 1.0,
        "methods": ["vvpm", "analytic"],
    }
    cfg.update(extra)
    return cfg


def test_models_subcommand(tmp_path, capsys):
    assert main(["models"]) == 0
    listing = json.loads(capsys.readouterr().out)
    assert set(listing["builtins"]) == {
        "free_particle", "harmonic_oscillator", "magnetic_field",
        "one_dim_potential"}
    assert "params" in listing["builtins"]["free_particle"]


def test_factor_free_particle(tmp_path):
    cfg = _write(tmp_path, "free.json", _free_config())
    out = tmp_path / "report.json"
    assert main(["factor", "--config", str(cfg), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert "error" not in report
    dev = report["pairwise_deviations"]["analytic|vvpm"]
    assert dev < 1e-10
    assert report["factors"]["vvpm"]["magnitude"] == pytest.approx(
        0.3989422804014327, rel=1e-12)
    assert report["path"]["action"] == pytest.approx(0.5, abs=1e-10)
    assert report["path"]["p_b"] == [pytest.approx(1.0, abs=1e-10)]
    assert report["path"]["energy_a"] == pytest.approx(0.5, abs=1e-10)


def test_factor_all_methods_close(tmp_path):
    cfg = _write(tmp_path, "all.json", _free_config(
        methods=["vvpm", "analytic", "general", "energy-hessian",
                 "gelfand-yaglom", "short-time", "dalembert"]))
    out = tmp_path / "report.json"
    assert main(["factor", "--config", str(cfg), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    # short-time is only O(dt) accurate; every other pair is tight
    for pair, dev in report["pairwise_deviations"].items():
        if "short-time" not in pair:
            assert dev < 1e-6, pair


def test_factor_time_dependent_gy(tmp_path):
    cfg = _write(tmp_path, "td.json", {
        "model": {"tag": "harmonic_oscillator",
                  "params": {"omega2": "(1 + 0.2*sin(t))^2"}},
        "x_a": [0.0], "x_b": [1.0], "t_b": 1.0,
        "methods": ["vvpm", "gelfand-yaglom"],
    })
    out = tmp_path / "report.json"
    assert main(["factor", "--config", str(cfg), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["pairwise_deviations"]["gelfand-yaglom|vvpm"] < 1e-6


def test_factor_focal_point_exit_2(tmp_path):
    cfg = _write(tmp_path, "focal.json", {
        "model": {"tag": "harmonic_oscillator", "params": {"omega2": 1.0}},
        "x_a": [0.0], "x_b": [1.0], "t_b": float(np.pi),
        "methods": ["analytic"],
    })
    out = tmp_path / "report.json"
    assert main(["factor", "--config", str(cfg), "--out", str(out)]) == 2
    report = json.loads(out.read_text())
    assert report["error"]["name"] == "FocalPoint"
    assert "factors" not in report


def test_unknown_key_rejected_before_output(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.json", _free_config(bogus_key=1))
    out = tmp_path / "report.json"
    assert main(["factor", "--config", str(cfg), "--out", str(out)]) == 1
    assert "bogus_key" in capsys.readouterr().err
    assert not out.exists()


def test_unknown_nested_keys_rejected(tmp_path):
    bad_model = _free_config()
    bad_model["model"]["params"]["massive"] = 2.0
    cfg = _write(tmp_path, "badm.json", bad_model)
    assert main(["factor", "--config", str(cfg)]) == 1

    bad_numerics = _free_config(numerics={"n_stepz": 100})
    cfg = _write(tmp_path, "badn.json", bad_numerics)
    assert main(["factor", "--config", str(cfg)]) == 1


def test_malformed_json_is_config_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert main(["factor", "--config", str(path)]) == 1


def test_report_determinism(tmp_path):
    cfg = _write(tmp_path, "det.json", _free_config(
        methods=["vvpm", "analytic", "gelfand-yaglom"]))
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(["factor", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["factor", "--config", str(cfg), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_scenario_round_trip():
    raw = _free_config(numerics={"n_steps": 400}, hbar=0.5)
    scenario = parse_scenario(raw)
    assert serialize_scenario(scenario) == raw


def test_verify_free_particle(tmp_path):
    cfg = _write(tmp_path, "vfree.json", {
        "model": {"tag": "free_particle", "params": {"mass": 1.0}},
        "x_a": [0.0], "x_b": [1.0], "t_b": 2.0,
        "t_mid": [0.4, 0.8, 1.0, 1.2, 1.6],
        "numerics": {"n_steps": 200},
    })
    out = tmp_path / "verify.json"
    assert main(["verify", "--config", str(cfg), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["all_passed"] is True
    for row in report["reports"]:
        assert row["factor_residual"] < 1e-10
        assert row["momentum_mismatch"] < 1e-10


def test_verify_quartic(tmp_path):
    cfg = _write(tmp_path, "vq.json", {
        "model": {"tag": "one_dim_potential",
                  "params": {"potential": "x^4/4"}},
        "x_a": [0.0], "x_b": [1.0], "t_b": 0.5,
        "t_mid": [0.1, 0.25, 0.4],
        "numerics": {"n_steps": 600},
    })
    out = tmp_path / "verify.json"
    assert main(["verify", "--config", str(cfg), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    for row in report["reports"]:
        assert row["factor_residual"] < 1e-6


def test_verify_negative_control_diagnostic(tmp_path):
    cfg = _write(tmp_path, "vneg.json", {
        "model": {"tag": "harmonic_oscillator", "params": {"omega2": 1.0}},
        "x_a": [0.0], "x_b": [1.0], "t_b": 1.0,
        "t_mid": [0.5],
        "midpoint_offset": [0.01],
        "numerics": {"n_steps": 400},
    })
    out = tmp_path / "verify.json"
    assert main(["verify", "--config", str(cfg), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["diagnostic_mode"] is True
    assert report["all_passed"] is False
    assert report["reports"][0]["momentum_mismatch"] > 1e-4


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_sweep_duration_matches_closed_form(tmp_path):
    cfg = _write(tmp_path, "sweep.json", {
        "model": {"tag": "harmonic_oscillator", "params": {"omega2": 1.0}},
        "x_a": [0.0], "x_b": [1.0], "t_b": 1.0,
        "methods": ["vvpm", "analytic"],
        "numerics": {"n_steps": 200},
        "sweep": {"parameters": [
            {"name": "T", "start": 0.1, "stop": 3.0, "count": 30}]},
    })
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    rows = _read_csv(out)
    assert len(rows) == 30
    for row in rows:
        t_tot = float(row["T"])
        expected = np.sqrt(1.0 / (2 * np.pi * abs(np.sin(t_tot))))
        assert float(row["vvpm_magnitude"]) == pytest.approx(expected,
                                                             rel=1e-5)
        assert float(row["max_deviation"]) < 1e-6


def test_sweep_hbar_scaling_column(tmp_path):
    cfg = _write(tmp_path, "hbar.json", {
        "model": {"tag": "free_particle", "params": {"mass": 1.0, "dim": 2}},
        "x_a": [0.0, 0.0], "x_b": [1.0, 0.0], "t_b": 1.0,
        "methods": ["vvpm"],
        "numerics": {"n_steps": 100},
        "sweep": {"parameters": [
            {"name": "hbar", "start": 0.5, "stop": 2.0, "count": 4}]},
    })
    out = tmp_path / "hbar.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    rows = _read_csv(out)
    scaled = [float(r["vvpm_magnitude"]) * float(r["hbar"]) for r in rows]
    np.testing.assert_allclose(scaled, scaled[0], rtol=1e-12)


def test_sweep_short_time_limit(tmp_path):
    cfg = _write(tmp_path, "short.json", {
        "model": {"tag": "one_dim_potential",
                  "params": {"potential": "x^4/4"}},
        "x_a": [0.0], "x_b": [0.001], "t_b": 1.0,
        "methods": ["vvpm"],
        "numerics": {"n_steps": 200},
        "sweep": {"parameters": [
            {"name": "T", "start": 0.001, "stop": 0.1, "count": 3}]},
    })
    out = tmp_path / "short.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    rows = sorted(_read_csv(out), key=lambda r: float(r["T"]))
    anchored = [float(r["vvpm_magnitude"]) * np.sqrt(float(r["T"]))
                for r in rows]
    target = 1.0 / np.sqrt(2 * np.pi)
    assert abs(anchored[0] - target) < 1e-5
    assert abs(anchored[0] - target) < abs(anchored[-1] - target)


def test_sweep_rows_survive_errors(tmp_path):
    # the 2.0 <= T rows put omega T past pi: FocalPoint recorded per row
    cfg = _write(tmp_path, "err.json", {
        "model": {"tag": "harmonic_oscillator", "params": {"omega2": 4.0}},
        "x_a": [0.0], "x_b": [1.0], "t_b": 1.0,
        "methods": ["analytic"],
        "sweep": {"parameters": [
            {"name": "T", "start": 1.0, "stop": 2.0, "count": 3}]},
    })
    out = tmp_path / "err.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    rows = _read_csv(out)
    errors = [r["error"] for r in rows]
    assert any("FocalPoint" in e for e in errors)
    assert any(e == "" for e in errors)


def test_sweep_threads_deterministic(tmp_path):
    payload = {
        "model": {"tag": "harmonic_oscillator", "params": {"omega2": 1.0}},
        "x_a": [0.0], "x_b": [1.0], "t_b": 1.0,
        "methods": ["vvpm", "analytic"],
        "numerics": {"n_steps": 200},
        "sweep": {"parameters": [
            {"name": "T", "start": 0.2, "stop": 2.0, "count": 6}]},
    }
    cfg = _write(tmp_path, "threads.json", payload)
    serial = tmp_path / "serial.csv"
    parallel = tmp_path / "parallel.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(serial)]) == 0
    assert main(["sweep", "--config", str(cfg), "--out", str(parallel),
                 "--threads", "3"]) == 0
    assert serial.read_bytes() == parallel.read_bytes()


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "vanvleck", "models"],
        capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "free_particle" in proc.stdout


def test_full_grid_flag(tmp_path):
    cfg = _write(tmp_path, "grid.json", _free_config(
        numerics={"n_steps": 1000}))
    small = tmp_path / "small.json"
    big = tmp_path / "big.json"
    assert main(["factor", "--config", str(cfg), "--out", str(small)]) == 0
    assert main(["factor", "--config", str(cfg), "--out", str(big),
                 "--full-grid"]) == 0
    n_small = len(json.loads(small.read_text())["path"]["t"])
    n_big = len(json.loads(big.read_text())["path"]["t"])
    assert n_small <= 256
    assert n_big == 1001

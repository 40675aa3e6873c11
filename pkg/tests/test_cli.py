"""Command-line behavior: exit codes, outputs, config merging."""

import json
import subprocess
import sys

import pytest
from click.testing import CliRunner

from vlasov_bridge.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def test_verify_example1_writes_report(runner, tmp_path):
    result = runner.invoke(main, ["verify", "--scenario", "example1",
                                  "--a", "2", "--x0", "0",
                                  "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["pass"] is True
    assert report["per_time"][0]["agreement"]["verdict"] == "Weak"


def test_verify_example2_strong(runner):
    result = runner.invoke(main, ["verify", "--scenario", "example2",
                                  "--q", "1", "--r0", "1"])
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert all(b["agreement"]["verdict"] == "Strong"
               for b in report["per_time"])


def test_verify_reads_config_file(runner, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({
        "scenario": {"type": "example1", "params": {"a": 2.0}},
        "times": [0.0, 1.0],
    }))
    result = runner.invoke(main, ["verify", "--config", str(cfg)])
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert [b["t"] for b in report["per_time"]] == [0.0, 1.0]


def test_flag_overrides_config_file(runner, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"scenario": {"type": "example1",
                                            "params": {"a": 2.0}}}))
    result = runner.invoke(main, ["verify", "--config", str(cfg), "--a", "3"])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["scenario"]["params"]["a"] == 3


def test_malformed_config_is_exit_2(runner, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{"scenario": {')
    result = runner.invoke(main, ["verify", "--config", str(cfg)])
    assert result.exit_code == 2


def test_unknown_type_in_config_is_exit_2(runner, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"scenario": {"type": "nosuch"}}))
    result = runner.invoke(main, ["verify", "--config", str(cfg)])
    assert result.exit_code == 2


def test_bad_times_flag_is_exit_2(runner):
    result = runner.invoke(main, ["verify", "--scenario", "example1",
                                  "--times", "0.0,abc"])
    assert result.exit_code == 2


def test_failed_check_is_exit_1(runner):
    result = runner.invoke(main, ["verify", "--scenario", "example1",
                                  "--tol-schrod", "1e-15"])
    assert result.exit_code == 1


def test_sphere_writes_trajectory(runner, tmp_path):
    result = runner.invoke(main, ["sphere", "--gamma-bar", "1", "--r0", "1",
                                  "--t-end", "1.63", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    lines = (tmp_path / "sphere_trajectory.csv").read_text().splitlines()
    assert lines[0] == "t,R,R_closed_form_gap,a,b,f"
    report = json.loads((tmp_path / "sphere.json").read_text())
    assert report["pass"] is True


def test_sphere_bad_horizon_is_exit_2(runner):
    result = runner.invoke(main, ["sphere", "--t-end", "-1"])
    assert result.exit_code == 2


def test_bridge_roundtrip_on_supported_grid(runner, tmp_path):
    result = runner.invoke(main, ["bridge", "--scenario", "example1",
                                  "--grid-lo", "-6", "--grid-hi", "6",
                                  "--grid-n", "384", "--roundtrip",
                                  "--times", "0.5", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "bridge.json").read_text())
    assert report["per_time"][0]["roundtrip_velocity_rel"] <= 1e-12
    assert (tmp_path / "U_t000.csv").exists()
    assert (tmp_path / "f_t000.csv").exists()


def test_fields_dumps_analogue_fields(runner, tmp_path):
    result = runner.invoke(main, ["fields", "--scenario", "example2",
                                  "--times", "0.0", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    for stem in ("chi", "E", "B", "D", "H"):
        assert (tmp_path / f"{stem}_t000.csv").exists()


def test_com_reports_acceleration(runner):
    result = runner.invoke(main, ["com", "--scenario", "example1"])
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert report["per_time"][0]["com_accel"][0] == pytest.approx(2.0,
                                                                  abs=1e-10)


def test_console_entry_point_version():
    out = subprocess.run([sys.executable, "-m", "vlasov_bridge.cli",
                          "--version"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "version" in out.stdout

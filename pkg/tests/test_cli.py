import csv
import subprocess
import sys

import pytest

from nosmc import scenarios
from nosmc.cli import build_grid, main, parse_axis, run_cell
from nosmc.errors import GridTooLarge, NosmcError
from nosmc.sim import read_csv


def test_list(capsys, tmp_path):
    assert main(["list", "--write-configs", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    for n in scenarios.names():
        assert n in out
    assert (tmp_path / "example41.json").exists()


def test_gains_from_explicit_errors(capsys):
    rc = main(["gains", "--Ld", "1.62", "--k2M", "10", "--kc", "2.5", "--e1c", "1", "--e2c", "2",
               "--rho-c0", "20", "--beta13", "2", "--e1", "1", "--e2", "-2"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "k1=1\n" in out and "k2=5.43\n" in out
    assert "rho=32.1888" in out and "rho_c=15.4369" in out
    assert "zone: II-2" in out


def test_gains_simulates_to_switch_instant(capsys):
    assert main(["gains", "--scenario", "example41", "--ideal"]) == 0
    out = capsys.readouterr().out
    assert "simulated, tc=19.3242" in out
    assert "k1=1.2501" in out and "k2=16.8755" in out


def test_gains_ceiling_is_an_error(capsys):
    # k2M too small for these switch errors
    rc = main(["gains", "--Ld", "5", "--k2M", "8", "--kc", "6", "--e1c", "1", "--e2c", "1.5",
               "--e1", "0.1", "--e2", "-5"])
    assert rc == 1
    assert "exceeds k2M=8" in capsys.readouterr().err


def test_gains_needs_inputs(capsys):
    assert main(["gains", "--e1", "1", "--e2", "-2"]) == 1
    assert "--Ld and --k2M" in capsys.readouterr().err


def test_simulate_writes_outputs(tmp_path, capsys):
    rc = main(["simulate", "--scenario", "example62", "--out-dir", str(tmp_path), "--assert-no-overshoot"])
    assert rc == 0
    cols = read_csv(tmp_path / "example62.csv")
    assert len(cols["t"]) == 30001
    assert (tmp_path / "example62_events.csv").read_text().startswith("kind,t\n")
    metrics = (tmp_path / "example62_metrics.txt").read_text()
    assert "overshoot: none" in metrics


def test_simulate_assertion_exit_code(tmp_path, capsys):
    rc = main(["simulate", "--scenario", "example41", "--controller", "pid", "--dt", "1e-3",
               "--out-dir", str(tmp_path), "--assert-no-overshoot"])
    assert rc == 2
    assert "ASSERTION FAILED" in capsys.readouterr().out


def test_simulate_from_config_file(tmp_path, capsys):
    cfg = scenarios.save(scenarios.get("example62"), tmp_path / "mine.json")
    assert main(["simulate", "--config", str(cfg), "--dt", "2e-3", "--out-dir", str(tmp_path)]) == 0
    assert len(read_csv(tmp_path / "example62.csv")["t"]) == 15001


def test_unknown_scenario_exit_code(capsys):
    assert main(["simulate", "--scenario", "nope"]) == 1
    assert "unknown scenario" in capsys.readouterr().err


def test_missing_config_file(capsys, tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 1


def test_parse_axis():
    assert parse_axis("rho=4,8") == ("rho", [4.0, 8.0])
    assert parse_axis("seed=0:3") == ("seed", [0, 1, 2])
    assert parse_axis("controller=ideal,smooth") == ("controller", ["ideal", "smooth"])
    with pytest.raises(NosmcError):
        parse_axis("rho")
    with pytest.raises(NosmcError):
        parse_axis("colour=1,2")


def test_grid_cap():
    axes = [("seed", list(range(40))), ("rho", [1.0] * 30)]
    with pytest.raises(GridTooLarge):
        build_grid(axes)
    assert len(build_grid(axes, max_cells=1200)) == 1200


def test_grid_cap_exit_code(capsys, tmp_path):
    rc = main(["sweep", "--scenario", "example62", "--grid", "seed=0:2000", "--out-dir", str(tmp_path)])
    assert rc == 1
    assert "cap is 1000" in capsys.readouterr().err


def test_run_cell_never_raises():
    row = run_cell("example62", None, {"kc": 1.0})  # kc below Ld
    assert row["status"].startswith("error: InvalidGain")


def test_sweep(tmp_path, capsys):
    rc = main(["sweep", "--scenario", "example62", "--grid", "rho=8,32", "--dt", "2e-3",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    with (tmp_path / "example62_sweep.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert [r["rho"] for r in rows] == ["8.0", "32.0"]
    assert all(r["status"] == "ok" and r["dt"] == "0.002" for r in rows)
    # the steady band shrinks like 1/rho
    assert float(rows[0]["sse1"]) / float(rows[1]["sse1"]) == pytest.approx(4.0, rel=0.05)


def test_sweep_assertion_counts_crossings(tmp_path, capsys):
    # at rho=8 the loop settles inside a boundary layer wide enough to dip past zero
    rc = main(["sweep", "--scenario", "example62", "--grid", "rho=8", "--dt", "2e-3",
               "--out-dir", str(tmp_path), "--assert-no-overshoot"])
    assert rc == 2


def test_console_script_help():
    res = subprocess.run([sys.executable, "-m", "nosmc.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "simulate" in res.stdout

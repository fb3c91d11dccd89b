import csv
import io
import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from epochgph.cli import build_parser, format_series, main, read_series

SNAPSHOTS = Path(__file__).parent / "snapshots"
SUBCOMMANDS = ("simulate", "periodogram", "estimate", "kernel", "predict-mse", "montecarlo")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def help_text(command, monkeypatch, capsys):
    monkeypatch.setenv("COLUMNS", "80")
    with pytest.raises(SystemExit) as exc:
        main([command, "--help"])
    assert exc.value.code == 0
    return capsys.readouterr().out


@pytest.fixture
def series(tmp_path, capsys):
    path = tmp_path / "x.csv"
    assert run(capsys, "simulate", "--n", "512", "--d", "0.3", "--seed", "7",
               "--out", str(path))[0] == 0
    return path


def test_simulate_rows(capsys):
    code, out, _ = run(capsys, "simulate", "--n", "512", "--d", "0.3", "--seed", "7")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["t", "x"] and len(rows) == 513
    assert [int(r[0]) for r in rows[1:]] == list(range(1, 513))


def test_simulate_deterministic(capsys):
    a = run(capsys, "simulate", "--n", "64", "--d", "0.2", "--phi", "0.4", "--seed", "3")[1]
    b = run(capsys, "simulate", "--n", "64", "--d", "0.2", "--phi", "0.4", "--seed", "3")[1]
    assert a == b


def test_round_trip_is_lossless(tmp_path):
    x = np.random.default_rng(0).standard_normal(50) * 10.0 ** np.arange(-25, 25)
    path = tmp_path / "x.csv"
    path.write_text(format_series(x))
    assert np.array_equal(read_series(str(path)), x)


def test_estimate_half_two_epochs(series, capsys):
    code, out, _ = run(capsys, "estimate", "--epochs", "2", "--bandwidth", "half",
                       "--input", str(series))
    rep = json.loads(out)
    assert code == 0 and rep["m"] == 127 and rep["schema_version"] == 1
    assert {"d_hat", "g", "sigma_a", "sigma_r", "ci_a", "ci_r", "intercept"} <= set(rep)


def test_periodogram(series, capsys):
    code, out, _ = run(capsys, "periodogram", "--epochs", "4", "--input", str(series))
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["k", "omega", "ibar"] and len(rows) == 65


def test_predict_mse(capsys):
    code, out, _ = run(capsys, "predict-mse", "--d", "0.3", "--phi", "-0.3", "--n", "512", "--g", "1")
    assert code == 0 and json.loads(out)["optimal_m"] == 103


def test_kernel(capsys):
    code, out, _ = run(capsys, "kernel", "--d", "0", "--j", "1", "--k", "1", "--which", "d1")
    res = json.loads(out)
    assert code == 0 and res["real"] == pytest.approx(2 * np.pi, abs=1e-6)
    code, out, _ = run(capsys, "kernel", "--d", "0", "--j", "2", "--k", "5", "--sigma2",
                       str(2 * np.pi), "--which", "finite:64")
    assert code == 0 and abs(json.loads(out)["real"]) < 1e-8


def test_montecarlo(tmp_path, capsys):
    cfg = {"model": {"d": 0.3}, "total_length": 128, "epoch_counts": [1, 2],
           "bandwidth_rules": ["half"], "replications": 5, "base_seed": 1}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps([cfg, {**cfg, "total_length": 256}]))
    code, out, err = run(capsys, "montecarlo", "--config", str(path))
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 5 and rows[0][0] == "N"
    assert "running" in err


@pytest.mark.parametrize("argv", [
    ["simulate", "--n", "10", "--d", "0.3", "--seed", "1", "--bogus"],
    ["simulate", "--n", "10", "--seed", "1"],
    ["estimate", "--bandwidth", "optimal"],
    ["estimate", "--bandwidth", "pow:3"],
    ["kernel", "--d", "0.1", "--j", "1", "--k", "1", "--which", "finite:x"],
    ["nonsense"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    assert capsys.readouterr().err.strip()


def test_runtime_errors_exit_1(series, tmp_path, capsys):
    code, out, err = run(capsys, "estimate", "--epochs", "3", "--bandwidth", "half",
                         "--input", str(series))
    assert code == 1 and out == "" and "divisible" in err
    bad = tmp_path / "bad.csv"
    bad.write_text("t,y\n1,2\n")
    assert run(capsys, "periodogram", "--input", str(bad))[0] == 1
    assert run(capsys, "simulate", "--n", "10", "--d", "0.7", "--seed", "1")[0] == 1
    assert run(capsys, "predict-mse", "--d", "0.3", "--n", "512")[0] == 1


def test_stdin_pipeline(series):
    text = series.read_text()
    proc = subprocess.run([sys.executable, "-m", "epochgph", "estimate", "--bandwidth", "half"],
                          input=text, capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["m"] == 255


@pytest.mark.parametrize("command", SUBCOMMANDS)
def test_help_lists_every_flag(command, monkeypatch, capsys):
    text = help_text(command, monkeypatch, capsys)
    sub = build_parser()._subparsers._group_actions[0].choices[command]
    for action in sub._actions:
        for flag in action.option_strings:
            assert flag in text


@pytest.mark.parametrize("command", SUBCOMMANDS)
def test_help_snapshot(command, monkeypatch, capsys):
    text = help_text(command, monkeypatch, capsys)
    snap = SNAPSHOTS / f"{command}.txt"
    if os.environ.get("UPDATE_SNAPSHOTS"):
        snap.write_text(text)
    assert text == snap.read_text()

import csv
import io
import json
import pathlib
import subprocess
import sys

import numpy as np
import pytest

from memcap import __version__
from memcap.cli import format_number, main

GOLDEN_DIR = pathlib.Path(__file__).parent / "golden"
GOLDEN = json.loads((GOLDEN_DIR / "reference_values.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_format_number():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(float("inf")) == '"inf"'
    assert format_number(float("nan")) == '"nan"'


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


# --- capacity -------------------------------------------------------------------

def test_capacity_memoryless(capsys):
    code, out, _ = run(capsys, "capacity", "--lambda", "0.5", "--mu", "0", "--task", "ebit", "--n", "100")
    assert code == 0
    rec = json.loads(out)
    assert rec["schema_version"] == "1" and rec["command"] == "capacity"
    assert rec["outputs"]["asymptotic_capacity"] == pytest.approx(1.0)
    assert rec["outputs"]["asymptotic_term"] == pytest.approx(100.0)


def test_capacity_golden(capsys):
    code, out, _ = run(capsys, "capacity", "--lambda", "0.8", "--mu", "0.2", "--task", "key",
                       "--n", "1000", "--epsilon", "0.05")
    assert code == 0
    got = json.loads(out)
    want = json.loads((GOLDEN_DIR / "capacity_0.8_0.2_key_n1000.json").read_text())
    assert got["inputs"] == want["inputs"]
    assert got["outputs"].keys() == want["outputs"].keys()
    for key, value in want["outputs"].items():
        assert got["outputs"][key] == pytest.approx(value, rel=1e-12), key


def test_capacity_is_deterministic(capsys):
    argv = ["capacity", "--lambda", "0.7", "--mu", "0.3", "--task", "qubit", "--n", "500", "--exact"]
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second


def test_capacity_zero_region_warns(capsys):
    code, out, err = run(capsys, "capacity", "--lambda", "0.25", "--mu", "0.1111111111", "--task", "qubit", "--n", "50")
    assert code == 0
    rec = json.loads(out)
    assert rec["outputs"]["lower"] == 0 and rec["outputs"]["clamped"] is True
    assert rec["warnings"] and "zero-capacity" in err


def test_capacity_small_n_needs_exact(capsys):
    assert run(capsys, "capacity", "--lambda", "0.6", "--mu", "0.2", "--task", "ebit", "--n", "2")[0] == 3
    code, out, _ = run(capsys, "capacity", "--lambda", "0.6", "--mu", "0.2", "--task", "ebit", "--n", "2", "--exact")
    assert code == 0
    rec = json.loads(out)
    assert "exact_sum_lower_bound" in rec["outputs"] and "lower" not in rec["outputs"]


def test_capacity_csv(capsys):
    code, out, _ = run(capsys, "capacity", "--lambda", "0.9", "--mu", "0.1", "--task", "ebit", "--n", "64", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1 and rows[0]["clamped"] in ("true", "false")


@pytest.mark.parametrize("argv", [
    ["capacity", "--lambda", "1.5", "--mu", "0", "--task", "ebit", "--n", "10"],
    ["capacity", "--lambda", "0.5", "--mu", "1", "--task", "ebit", "--n", "10"],
    ["capacity", "--lambda", "0.5", "--mu", "0", "--task", "ebit", "--n", "10", "--epsilon", "0"],
    ["capacity", "--lambda", "0.5", "--mu", "0", "--task", "photons", "--n", "10"],
    ["capacity", "--lambda", "0.5", "--mu", "0", "--task", "ebit"],
    ["spectrum", "--lambda", "abc", "--mu", "0", "--n", "4"],
    [],
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 3
    assert "error" in capsys.readouterr().err


def test_usage_error_names_valid_range(capsys):
    with pytest.raises(SystemExit):
        main(["capacity", "--lambda", "1.5", "--mu", "0", "--task", "ebit", "--n", "10"])
    assert "valid range is (0, 1)" in capsys.readouterr().err


# --- uses-needed ----------------------------------------------------------------

def test_uses_needed_golden(capsys):
    code, out, _ = run(capsys, "uses-needed", "--lambda", "0.9", "--mu", "0.5", "--task", "key",
                       "--epsilon", "0.05", "--target-k", "100")
    assert code == 0
    o = json.loads(out)["outputs"]
    assert o["n"] == GOLDEN["uses_needed_0.9_0.5_key_eps0.05_k100"]
    assert o["bound_at_n"] >= 100 > o["bound_at_n_minus_1"]


def test_uses_needed_debug_coefficients(capsys):
    code, out, _ = run(capsys, "uses-needed", "--lambda", "0.5", "--mu", "0", "--task", "ebit",
                       "--target-k", "4", "--debug-coefficients", "1,0,0")
    assert code == 0
    o = json.loads(out)["outputs"]
    assert o["n"] == 4 and o["bound_at_n_minus_1"] is None


def test_uses_needed_hidden_flag_not_in_help(capsys):
    with pytest.raises(SystemExit):
        main(["uses-needed", "--help"])
    assert "debug" not in capsys.readouterr().out


def test_uses_needed_unreachable_is_domain_error(capsys):
    code, out, _ = run(capsys, "uses-needed", "--lambda", "0.3", "--mu", "0", "--task", "qubit", "--target-k", "10")
    assert code == 2
    rec = json.loads(out)
    assert rec["error"]["type"] == "UnreachableTarget"
    assert rec["outputs"] is None and rec["inputs"]["lambda"] == 0.3


# --- spectrum -------------------------------------------------------------------

def test_spectrum_memoryless_rows(capsys):
    code, out, _ = run(capsys, "spectrum", "--lambda", "0.6", "--mu", "0", "--n", "5")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 5
    assert {round(float(r["transmissivity"]), 12) for r in rows} == {0.6}


def test_spectrum_single_row(capsys):
    code, out, _ = run(capsys, "spectrum", "--lambda", "0.6", "--mu", "0.3", "--n", "1")
    assert code == 0 and len(out.strip().splitlines()) == 2


def test_spectrum_golden(capsys):
    code, out, _ = run(capsys, "spectrum", "--lambda", "0.5", "--mu", "0.25", "--n", "64")
    assert code == 0
    eta = [float(r["transmissivity"]) for r in csv.DictReader(io.StringIO(out))]
    np.testing.assert_allclose(eta, GOLDEN["transmissivities_0.5_0.25_n64"], atol=1e-12)


def test_spectrum_json(capsys):
    code, out, _ = run(capsys, "spectrum", "--lambda", "0.5", "--mu", "0.25", "--n", "3", "--format", "json")
    assert code == 0 and len(json.loads(out)["outputs"]) == 3


def test_spectrum_size_cap(capsys, monkeypatch):
    monkeypatch.setenv("MEMCAP_MAX_N", "10")
    code, _, err = run(capsys, "spectrum", "--lambda", "0.5", "--mu", "0.25", "--n", "64")
    assert code == 3 and "MEMCAP_MAX_N" in err


def test_output_file(capsys, tmp_path):
    target = tmp_path / "s.csv"
    code, out, _ = run(capsys, "spectrum", "--lambda", "0.5", "--mu", "0.25", "--n", "4", "-o", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("index,")


# --- verify ---------------------------------------------------------------------

def test_verify_quick(capsys):
    code, out, err = run(capsys, "verify", "--grid", "quick")
    assert code == 0
    reports = [json.loads(line) for line in out.splitlines()]
    assert reports and all(r["passed"] for r in reports)
    assert "0 failing" in err


def test_verify_custom_grid(capsys, tmp_path):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"lambdas": [0.6], "mus": [0.2], "n_list": [4, 8], "rank_cases": [[16, 2]],
                                "fourier_N": [2]}))
    code, out, _ = run(capsys, "verify", "--grid", str(grid), "--workers", "2")
    assert code == 0 and len(out.splitlines()) == 8


@pytest.mark.parametrize("content, fragment", [
    ('{"lambdas": []}', "empty"),
    ('{"lambdas": [0.5],\n "colour": 1}', "unknown grid keys"),
    ('{"lambdas": [0.5,\n ]}', "line 2"),
])
def test_verify_bad_grid(capsys, tmp_path, content, fragment):
    grid = tmp_path / "grid.json"
    grid.write_text(content)
    code, _, err = run(capsys, "verify", "--grid", str(grid))
    assert code == 3 and fragment in err


def test_verify_failure_exit_code(capsys, tmp_path):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"lambdas": [0.6], "mus": [0.2], "n_list": [4], "rank_cases": [[8, 4]]}))
    code, _, err = run(capsys, "verify", "--grid", str(grid))
    assert code == 1 and "FAIL rank_perturbation" in err


# --- entry points ---------------------------------------------------------------

def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "memcap", "capacity", "--lambda", "0.6", "--mu", "0",
                          "--task", "key", "--n", "10"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["outputs"]["asymptotic_capacity"] == pytest.approx(-np.log2(0.4))

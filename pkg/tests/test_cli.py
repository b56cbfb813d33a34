import json
import subprocess
import sys
from pathlib import Path

import pytest

from gaussvar.cli import main

GOLDEN = Path(__file__).parent / "golden" / "demo_bench.tsv"


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_check_exponent_constant_passes(capsys):
    code, out = run(capsys, "check-exponent", "--spec", "const2", "--n-balls", "300", "--n-pairs", "500")
    assert code == 0
    assert "equivalence: all pass" in out


def test_check_exponent_step_jump_lh0_fails(capsys):
    code, _ = run(capsys, "check-exponent", "--spec", "step_jump", "--dim", "1", "--conditions", "LH0")
    assert code == 1


def test_check_exponent_inverse_log_all_fail(capsys):
    code, out = run(capsys, "check-exponent", "--spec", "inv_log", "--conditions", "equivalence")
    assert "all fail (consistent)" in out
    assert code == 1


def test_usage_errors(capsys):
    assert main(["check-exponent", "--spec", "nope"]) == 2
    assert main(["check-exponent", "--conditions", "bogus"]) == 2
    assert main(["riesz", "--alpha", "0"]) == 2
    capsys.readouterr()


def test_measure(capsys):
    code, out = run(capsys, "measure", "--center", "0", "--radius", "1")
    assert code == 0 and "0.8427007929" in out


def test_norm_with_trials(capsys):
    code, _ = run(capsys, "norm", "--spec", "inv_square", "--trials", "5", "--grid", "256")
    assert code == 0


def test_riesz_identity_suite(capsys):
    code, out = run(capsys, "riesz", "--identity-suite", "2", "--degree", "6", "--trials", "20")
    assert code == 0 and "max" in out


def test_riesz_both_paths(capsys):
    code, out = run(capsys, "riesz", "--variant", "new", "--alpha", "1", "--beta", "3", "--path", "both",
                    "--n-points", "5")
    assert code == 0
    delta = float(out.strip().splitlines()[-1].split("=")[-1])
    assert delta <= 5e-3


def test_riesz_zero_input(capsys, tmp_path):
    cfg = tmp_path / "zero.json"
    cfg.write_text(json.dumps({"alpha": [1], "coeffs": {"dim": 1, "degree_cap": 2, "coefficients": []},
                               "path": "spectral", "n_points": 3}))
    code, out = run(capsys, "riesz", "--config", str(cfg), "--out", str(tmp_path))
    assert code == 0
    rows = (tmp_path / "riesz.tsv").read_text().splitlines()[1:]
    assert len(rows) == 3
    assert all(float(r.split("\t")[1]) == 0.0 for r in rows)
    rec = json.loads((tmp_path / "riesz.json").read_text())
    assert rec["max_delta"] is None


def test_maximal_prerequisite_and_force(capsys):
    code, _ = run(capsys, "bench", "--spec", "step_jump", "--grid", "128", "--levels", "5", "--no-refine")
    assert code == 1
    code, out = run(capsys, "bench", "--spec", "step_jump", "--grid", "128", "--levels", "5", "--no-refine",
                    "--force")
    assert code == 1 and "empirical K" in out


def test_constant_function_row_is_one(capsys, tmp_path):
    code, _ = run(capsys, "bench", "--grid", "256", "--no-refine", "--out", str(tmp_path))
    assert code == 0
    rows = (tmp_path / "bench.tsv").read_text().splitlines()
    one = next(r.split("\t") for r in rows if r.split("\t")[1] == "one")
    assert float(one[4]) == pytest.approx(1.0)


def test_bad_thread_variable(capsys, monkeypatch):
    monkeypatch.setenv("GAUSSVAR_THREADS", "zero")
    assert main(["measure"]) == 2
    capsys.readouterr()


def test_demo_bench_reproduces_golden_table(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "gaussvar.cli", "bench", "--config", "demo_bench",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "bench.tsv").read_bytes() == GOLDEN.read_bytes()

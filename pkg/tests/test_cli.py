import json
import subprocess
import sys

import pytest

from matqe.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_qe_psd(capsys):
    code, out, _ = run(["qe", "--n", "2", "0 <= X"], capsys)
    assert code == 0 and "tr(X" in out


def test_qe_center_json_report(capsys):
    code, out, _ = run(["qe", "--n", "2", "--report", "forall Y: X*Y = Y*X"], capsys)
    payload = json.loads(out)
    assert code == 0 and payload["language"] == "matrix"
    assert payload["report"]["diagnostics"]["steps"]


def test_qe_scalar(capsys):
    code, out, _ = run(["qe", "exists x: x^2 <= t"], capsys)
    assert code == 0 and out.strip() == "0 <= t"


def test_parse_error_exit_1(capsys):
    code, _, err = run(["qe", "0 <= "], capsys)
    assert code == 1 and "bytes" in err


def test_usage_errors(capsys):
    assert run([], capsys)[0] == 1
    assert run(["frobnicate"], capsys)[0] == 1
    assert run(["qe", "--n", "0", "X = 0"], capsys)[0] == 1
    assert run(["eval", "exists Y: X = Y", "--assign", "{}"], capsys)[0] == 1


def test_capacity_exit_2(capsys):
    code, out, err = run(["qe", "--n", "3", "--json", "0 <= X"], capsys)
    assert code == 2 and "capacity" in err
    assert json.loads(out)["error"] == "capacity-exceeded"


def test_invariants(capsys):
    code, out, _ = run(["invariants", '{"n":2,"mode":"real","entries":[["1","0"],["0","2"]]}'], capsys)
    vec = json.loads(out)
    assert code == 0 and vec["values"][0] == {"word": "x1", "value": "3"}
    zero = '{"n":2,"mode":"real","entries":[["0","0"],["0","0"]]}'
    _, out, _ = run(["invariants", "--no-dedup", zero], capsys)
    vals = json.loads(out)["values"]
    assert len(vals) == 30 and all(v["value"] == "0" for v in vals)
    _, out, _ = run(["invariants", zero], capsys)
    assert len(json.loads(out)["values"]) == 15


def test_similar(capsys):
    d12 = '{"n":2,"mode":"real","entries":[["1","0"],["0","2"]]}'
    d21 = '{"n":2,"mode":"real","entries":[["2","0"],["0","1"]]}'
    d13 = '{"n":2,"mode":"real","entries":[["1","0"],["0","3"]]}'
    assert run(["similar", d12, d12], capsys)[1].strip() == "true"
    assert run(["similar", d12, d21], capsys)[1].strip() == "true"
    code, out, _ = run(["similar", d12, d13], capsys)
    assert out.startswith("false") and "x1" in out


def test_eval_and_equiv(capsys):
    assign = '{"X": {"n":2,"mode":"real","entries":[["1","0"],["0","1"]]}}'
    assert run(["eval", "tr(X) >= 0", "--assign", assign], capsys)[1].strip() == "true"
    code, out, _ = run(["equiv", "x >= 0", "x > 0", "--json"], capsys)
    v = json.loads(out)
    assert code == 0 and not v["agree"] and v["counterexample"]["assignment"]["x"] == "0"
    code, out, _ = run(["equiv", "X = X^* and 0 <= X", "0 <= X", "--trials", "200"], capsys)
    assert out.startswith("agree") and "seed 0" in out


def test_time_budget_env(monkeypatch, capsys):
    monkeypatch.setenv("MATQE_TIME_BUDGET_MS", "1")
    code, _, _ = run(["qe", "--n", "2", "X*X = 0 and X = X^* and 0 <= X and X*X*X = X"], capsys)
    assert code in (0, 2)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "matqe.cli", "qe", "exists x: a*x + b = 0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()

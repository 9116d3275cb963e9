import json
import subprocess
import sys
from pathlib import Path

import pytest

from planarends.cli import run

DATA = Path(__file__).resolve().parents[1] / "data"


def _json(path):
    return json.loads(Path(path).read_text())


def test_solve_builtin_and_guess(tmp_path):
    src = tmp_path / "b.json"
    src.write_text(json.dumps({"builtin": "fan", "params": {"n": 3}}))
    out = tmp_path / "o.json"
    assert run(["solve", "-i", str(src), "-o", str(out)]) == 0
    res = _json(out)
    assert res["certificate"]["pass"]
    assert run(["solve", "-i", str(DATA / "fan3_guess.json"), "-o", str(out)]) == 0
    assert 0 < _json(out)["iterations"] <= 10


def test_solve_iteration_cap(tmp_path):
    out = tmp_path / "o.json"
    assert run(["solve", "-i", str(DATA / "fan3_guess.json"), "-o", str(out),
                "--max-iter", "1"]) == 1


def test_forces_riemann(tmp_path, capsys):
    assert run(["forces", "-i", str(DATA / "riemann.json")]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data


def test_concat_and_classify(tmp_path):
    out = tmp_path / "c.json"
    assert run(["concat", "-i", str(DATA / "fib.json"), "-o", str(out),
                "--window", "-3", "3"]) == 0
    assert _json(out)["window"] == [-3, 3]
    assert run(["classify", "-i", str(DATA / "fib.json"), "-o", str(out),
                "--max-window", "8"]) == 0
    assert run(["classify", "-i", str(DATA / "periodic.json"), "-o", str(out)]) == 0


def test_periods(tmp_path):
    out = tmp_path / "p.json"
    assert run(["periods", "--word", str(DATA / "fib.json"), "-o", str(out), "--t", "1e-3"]) == 0
    res = _json(out)
    assert res["limit_balance"]["deviation"] < 1e-10
    assert all(z["pass"] for z in res["zeros"])
    assert all("vertical_period" in n for n in res["necks"])


@pytest.mark.parametrize("argv", [
    [],
    ["solve"],
    ["forces", "-i", "/nonexistent.json"],
    ["mesh", "--word", str(DATA / "fib.json")],
    ["mesh", "--word", str(DATA / "fib.json"), "-o", "x.obj", "--t", "1.5"],
    ["periods", "-i", str(DATA / "riemann.json"), "--word", str(DATA / "fib.json")],
    ["concat", "-i", str(DATA / "riemann.json")],
])
def test_usage_errors(argv):
    assert run(argv) == 2


def test_invalid_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["forces", "-i", str(bad)]) == 2


def test_reference_checks_command(tmp_path):
    out = tmp_path / "v.json"
    assert run(["verify-paper", "-o", str(out)]) == 0
    res = _json(out)
    assert res["pass"] and all(c["pass"] for c in res["checks"])
    # an impossible tolerance makes the same run fail
    assert run(["verify-paper", "-o", str(out), "--tol", "1e-300"]) == 1


def test_mesh_outputs_deterministic(tmp_path):
    args = ["mesh", "--word", str(DATA / "fan2_chain.json"), "--grid", "48", "--ring", "16",
            "--rows", "8", "--sample", "500"]
    assert run(args + ["-o", str(tmp_path / "a.obj")]) == 0
    assert run(args + ["-o", str(tmp_path / "b.obj")]) == 0
    assert (tmp_path / "a.obj").read_bytes() == (tmp_path / "b.obj").read_bytes()
    ra, rb = _json(tmp_path / "a.report.json"), _json(tmp_path / "b.report.json")
    ra.pop("mesh"), rb.pop("mesh")
    assert ra == rb
    assert ra["pass"] and ra["genus"] == 1 and ra["frame"] == "scaled"


def test_mesh_large_t_fails(tmp_path):
    args = ["mesh", "--word", str(DATA / "fan2_chain.json"), "--grid", "48", "--ring", "16",
            "--rows", "8", "--sample", "500", "--t", "0.5", "-o", str(tmp_path / "m.obj")]
    assert run(args) == 1
    rep = _json(tmp_path / "m.report.json")
    assert not rep["pass"] and not rep["checks"]["slabs"]


def test_json_output_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run(["concat", "-i", str(DATA / "fib.json"), "-o", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "planarends", "--version"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()

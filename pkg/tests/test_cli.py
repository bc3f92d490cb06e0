from __future__ import annotations

import json
import subprocess
import sys

import pytest

from frieze.cc import PolygonTriangulation
from frieze.cli import main
from frieze.cluster import D4_FRIEZE_GRID
from frieze.lambda_engine import LambdaState
from frieze.solver import replay


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_polygon_grid(capsys):
    code, out, _ = run(capsys, "polygon", "--quiddity", "1,2,1,2")
    assert code == 0
    rows = [ln.split() for ln in out.splitlines()[1:]]
    assert rows == [["1"] * 4, ["1", "2", "1", "2"], ["1"] * 4]


def test_polygon_closure_failure(capsys):
    code, _, err = run(capsys, "polygon", "--quiddity", "2,2,2,2,2,2")
    assert code == 1 and "closure" in err and "{0,5}" in err


def test_polygon_from_triangulation(capsys, tmp_path):
    fan = PolygonTriangulation(6, frozenset({(0, 2), (0, 3), (0, 4)}))
    path = tmp_path / "fan6.json"
    path.write_text(json.dumps(fan.to_json()))
    code, out, _ = run(capsys, "polygon", "--from-triangulation", str(path), "--json")
    assert code == 0
    assert json.loads(out)["quiddity"] == [4, 1, 2, 2, 2, 1]


def test_polygon_bad_inputs(capsys, tmp_path):
    assert run(capsys, "polygon", "--quiddity", "2,a")[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "polygon", "--from-triangulation", str(bad))[0] == 1
    assert run(capsys, "polygon", "--from-triangulation", str(tmp_path / "missing.json"))[0] == 1


def test_quiver_d4_non_unitary(capsys):
    code, out, _ = run(capsys, "quiver", "--arrows", "1>4,2>4,3>4", "--values", "2,2,2,3", "--check-unitary")
    assert code == 0 and out.strip() == "non-unitary (closure, 50 clusters)"


def test_quiver_unitary(capsys):
    code, out, _ = run(capsys, "quiver", "--arrows", "1>2,2>3", "--values", "1,1,1", "--check-unitary")
    assert code == 0 and out.strip() == "unitary (empty word)"


def test_quiver_budget_exhausted(capsys):
    code, out, _ = run(capsys, "quiver", "--arrows", "1>2", "--values", "2,5", "--check-unitary", "--budget", "1")
    assert code == 2 and "unknown" in out


def test_quiver_rejects_malformed(capsys):
    assert run(capsys, "quiver", "--arrows", "1>1", "--values", "1")[0] == 1
    assert run(capsys, "quiver", "--arrows", "1>2", "--values", "1,0")[0] == 1


def test_mesh_check(capsys, tmp_path):
    path = tmp_path / "d4.txt"
    path.write_text(D4_FRIEZE_GRID.dumps())
    code, out, _ = run(capsys, "quiver", "--mesh-check", str(path), "--type", "D4")
    assert code == 0 and out.startswith("0 violations")
    body = "\n".join(D4_FRIEZE_GRID.dumps().splitlines()[1:])
    headless = tmp_path / "d4_body.txt"
    headless.write_text(body.replace("3", "4", 1))
    code, out, _ = run(capsys, "quiver", "--mesh-check", str(headless), "--type", "D4", "--json")
    assert code == 1 and json.loads(out)["violations"]


def test_surface_solve_and_corruption(capsys, tmp_path):
    base = tmp_path / "base.json"
    assert run(capsys, "surface", "base", "--spec", "pants:2,1,1", "-o", str(base))[0] == 0
    code, out, _ = run(capsys, "surface", "solve", "--spec", "pants:2,1,1", "--state", str(base), "--json")
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "UnitaryFound" and rep["flipWord"] == [] and rep["schemaVersion"] == 1

    scr = tmp_path / "scr.json"
    run(capsys, "surface", "scramble", "--spec", "pants:2,1,1", "--flips", "8", "--rng-seed", "5", "-o", str(scr))
    for extra in ([], ["--structural"]):
        code, out, _ = run(capsys, "surface", "solve", "--spec", "pants:2,1,1", "--state", str(scr), "--json", *extra)
        rep = json.loads(out)
        assert code == 0
        state = LambdaState.from_json(json.loads(scr.read_text()))
        assert replay(state, rep["flipWord"]).is_unitary()

    data = json.loads(base.read_text())
    key = sorted(data["values"], key=int)[0]
    data["values"][key] = "3"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, out, _ = run(capsys, "surface", "solve", "--spec", "pants:2,1,1", "--state", str(bad), "--json")
    assert code == 3 and json.loads(out)["status"] == "NonIntegralDetected"


def test_surface_errors(capsys, tmp_path):
    assert run(capsys, "surface", "base", "--spec", "pants:1,1,1,1")[0] == 1
    base = tmp_path / "b.json"
    run(capsys, "surface", "base", "--spec", "annulus:2,1", "-o", str(base))
    assert run(capsys, "surface", "solve", "--spec", "annulus:2,2", "--state", str(base))[0] == 1
    assert run(capsys, "surface", "solve", "--spec", "annulus:2,1")[0] == 1


def test_roundtrip(capsys):
    code, out, _ = run(
        capsys, "surface", "roundtrip", "--spec", "pants:1,1,1", "--flips", "8", "--trials", "20", "--rng-seed", "42"
    )
    assert code == 0
    assert out.startswith("20/20 recovered; uniqueness certificate OK; short-diagonal law OK")


def test_roundtrip_json_deterministic_across_threads(capsys):
    args = ["surface", "roundtrip", "--spec", "annulus:3,2", "--flips", "6", "--trials", "6", "--rng-seed", "9", "--json"]
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    _, c, _ = run(capsys, *args, "--threads", "2")
    assert a == b == c
    assert json.loads(a)["recovered"] == 6


def test_claims_commands(capsys):
    code, out, _ = run(capsys, "claims", "enumerate", "--p", "4", "--q", "1", "--l", "3")
    assert code == 0 and out.startswith("all 4 triangulations contain a good quadrilateral")
    code, out, _ = run(capsys, "claims", "--p", "4", "--q", "1", "--k", "1")
    assert code == 0 and "case histogram" in out
    code, out, _ = run(capsys, "claims", "--p", "4", "--q", "1", "--k", "2", "--l", "3", "--cap", "10")
    assert code == 0 and out.startswith("no consistent frieze instance found")
    assert run(capsys, "claims", "--p", "4", "--q", "1", "--k", "2", "--l", "2")[0] == 1
    assert run(capsys, "claims", "enumerate", "--p", "4", "--q", "1", "--l", "4")[0] == 1


def test_bad_rng_seed(capsys):
    with pytest.raises(SystemExit):
        main(["surface", "roundtrip", "--spec", "2,1", "--rng-seed", "-1"])
    capsys.readouterr()


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "frieze.cli", "polygon", "--quiddity", "2,1,3,2,1,3", "--json"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert json.loads(proc.stdout)["quiddity"] == [2, 1, 3, 2, 1, 3]

import csv
import io
import json

import numpy as np
import pytest

from chanres import channel as ch
from chanres.cli import run
from chanres.report import render_table

H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, chan in {
        "id": ch.identity(2),
        "had": ch.unitary_channel(H),
        "z": ch.unitary_channel(np.diag([1.0, -1.0])),
        "depol": ch.completely_depolarizing(2),
        "zero": ch.constant_channel(np.diag([1.0, 0.0]), 2),
        "cq": ch.to_choi(ch.Cq([np.full((2, 2), 0.5), np.diag([1.0, 0.0])])),
    }.items():
        p = tmp_path / f"{name}.json"
        ch.save_channel(chan, p)
        paths[name] = p
    return paths


def test_dmax_json(files):
    code, out, _ = _run("dmax", "--lhs", files["id"], "--rhs", files["depol"], "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["verb"] == "dmax"
    assert abs(doc["results"]["dmax_bits"] - 2.0) < 1e-8
    assert doc["provenance"]["version"] == "0.1.0"


def test_json_to_table_round_trip(files):
    _, js, _ = _run("robust", files["had"], "--free", "mio", "--format", "json")
    _, table, _ = _run("robust", files["had"], "--free", "mio")
    assert render_table(json.loads(js)) == table


def test_output_is_deterministic(files):
    a = _run("power", files["had"], "--starts", "4", "--format", "json")
    b = _run("power", files["had"], "--starts", "4", "--format", "json")
    assert a == b and a[0] == 0


def test_diamond_and_dist_free(files):
    _, out, _ = _run("diamond", "--lhs", files["id"], "--rhs", files["z"], "--format", "json")
    assert abs(json.loads(out)["results"]["half_diamond_distance"] - 1.0) < 1e-6
    _, out, _ = _run("dist-free", files["id"], "--free", "constant", "--format", "json")
    assert abs(json.loads(out)["results"]["half_diamond_distance_to_free"] - 0.75) < 1e-6


def test_imax_and_cq_cost(files):
    _, out, _ = _run("imax", files["id"], "--format", "json")
    assert abs(json.loads(out)["results"]["imax_bits"] - 2.0) < 1e-6
    _, out, _ = _run("cq-cost", files["cq"], "--format", "json")
    assert abs(json.loads(out)["results"]["cost_bits"] - 1.0) < 1e-9
    code, _, err = _run("cq-cost", files["had"])
    assert code == 2 and "channel" in err


def test_convex_split_csv_columns(files):
    code, out, _ = _run("convex-split", "--alpha", files["zero"], "--beta", files["depol"], "--n", 8,
                        "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["n", "lambda", "distance", "bound", "shortcut", "dim"]
    assert len(rows) == 2 and len(rows[1]) == 6
    assert abs(float(rows[1][2]) - 35 / 256) < 1e-9


def test_empty_suite_csv_is_header_only():
    code, out, _ = _run("monotone-suite", "--free", "mio", "--trials", 2, "--format", "csv")
    assert code == 0
    assert out == "check,trial,lhs,rhs,detail\n"


def test_axioms_table(files):
    code, out, _ = _run("axioms", "--free", "constant", "--trials", 3)
    assert code == 0
    assert "swap" in out or "fail" in out


def test_majorize():
    _, out, _ = _run("majorize", "--p", "1,0,0", "--q", "0.5,0.5,0", "--format", "json")
    assert json.loads(out)["results"]["majorizes"] is True
    code, _, err = _run("majorize", "--p", "0.7,0.7", "--q", "1")
    assert code == 2 and "--p" in err


def test_erasure_and_simulate(files):
    code, out, _ = _run("erasure", files["zero"], "--free", "maxmixed", "--eps", 0.3, "--eta", 0.1,
                        "--format", "json")
    assert code == 0
    assert json.loads(out)["results"]["executed"] is True
    code, out, _ = _run("simulate-check", "--channel", files["had"], "--target", files["had"],
                        "--pre", files["id"], "--post", files["id"], "--free", "maxmixed", "--format", "json")
    assert code == 0 and json.loads(out)["results"]["passed"] is True


def test_gibbs_free_set_flags(files):
    code, out, _ = _run("robust", files["zero"], "--free", "gibbs", "--energies", "0,1", "--beta", 2,
                        "--format", "json")
    assert code == 0
    code, _, err = _run("robust", files["zero"], "--free", "gibbs")
    assert code == 2 and "--energies" in err


def test_validation_errors(files, tmp_path):
    assert _run("dmax", "--lhs", files["id"])[0] == 2
    code, _, err = _run("dmax", "--lhs", tmp_path / "missing.json", "--rhs", files["id"])
    assert code == 2 and "--lhs" in err
    code, _, err = _run("robust", files["id"], "--free", "mio", "--eps", 2)
    assert code == 2 and "--eps" in err
    assert _run("robust", files["id"], "--free", "bogus")[0] == 2
    assert _run("nonsense")[0] == 2


def test_solver_failure_exit_code(files, monkeypatch):
    # an impossible iteration budget forces a non-optimal solve
    import chanres.cli as cli
    from chanres.conic import SolverOptions

    monkeypatch.setattr(cli, "_options", lambda args: SolverOptions(max_iters=1))
    code, out, err = _run("imax", files["had"], "--format", "json")
    assert code == 3
    assert "status=" in err
    assert json.loads(out)["provenance"]["solver_status"] != "Optimal"


def test_tolerance_env(files, monkeypatch):
    monkeypatch.setenv("CHANRES_SOLVER_TOL", "1e-6")
    _, out, _ = _run("imax", files["id"], "--format", "json")
    assert json.loads(out)["provenance"]["solver"]["gap_tol"] == 1e-6

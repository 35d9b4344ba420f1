import csv
import json

import numpy as np
import pytest

from proxframe import save_matrix_csv, save_matrix_json
from proxframe.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_flagship_passes(capsys):
    code, out, _ = run(capsys, "verify", "--operator", "example35", "--prox", "soft:1",
                       "--trials", "40", "--seed", "1")
    assert code == 0
    reports = [json.loads(line) for line in out.strip().splitlines()]
    assert all(r["pass"] for r in reports)
    names = [r["property"] for r in reports]
    assert "prox_identity" in names and "operator_identities" in names
    prox_identity = next(r for r in reports if r["property"] == "prox_identity")
    assert prox_identity["max_violation"] <= 1e-6


def test_verify_identity_operator(capsys):
    code, out, _ = run(capsys, "verify", "--operator", "identity:3", "--prox", "soft:1",
                       "--trials", "20")
    assert code == 0


def test_verify_identity_inner_prox(capsys):
    # zero inner function: the induced regularizer vanishes and the
    # composition reduces to the identity, but every check must still run
    code, out, _ = run(capsys, "verify", "--operator", "example35", "--prox", "identity",
                       "--trials", "20", "--seed", "2")
    assert code == 0
    reports = [json.loads(line) for line in out.strip().splitlines()]
    assert {r["property"] for r in reports} >= {"prox_identity", "weaker_regularizer"}


def test_verify_rank_deficient_file_is_usage_error(tmp_path, capsys):
    path = tmp_path / "rankdef.csv"
    path.write_text("1,2\n2,4\n")
    code, _, err = run(capsys, "verify", "--operator", str(path), "--prox", "soft:1")
    assert code == 2
    assert "injective" in err or "rank" in err


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "--operator", "nonsense"),
        ("verify", "--operator", "random:axb:3"),
        ("verify", "--prox", "mystery:1"),
        ("regularizer", "--grid", "banana"),
        ("solve",),  # neither --x nor --problem
        ("solve", "--x", "1,2"),  # wrong length for example35
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.strip()


def test_verify_failure_exits_1(capsys):
    # an impossible tolerance turns float noise into a reported failure
    code, out, _ = run(capsys, "verify", "--operator", "random:6x3:1", "--prox", "soft:1",
                       "--trials", "10", "--tol", "1e-30")
    assert code == 1
    reports = [json.loads(line) for line in out.strip().splitlines()]
    assert any(not r["pass"] for r in reports)


def test_verify_runs_are_byte_identical(capsys):
    args = ("verify", "--operator", "random:5x3:9", "--prox", "soft:0.5",
            "--trials", "30", "--seed", "42")
    _, out1, _ = run(capsys, *args)
    _, out2, _ = run(capsys, *args)
    assert out1 == out2


def test_verify_byte_identical_under_thread_fanout(capsys, monkeypatch):
    args = ("verify", "--operator", "random:6x3:4", "--prox", "soft:1",
            "--trials", "32", "--seed", "5")
    monkeypatch.delenv("PROXFRAME_THREADS", raising=False)
    _, serial, _ = run(capsys, *args)
    monkeypatch.setenv("PROXFRAME_THREADS", "4")
    _, threaded, _ = run(capsys, *args)
    assert serial == threaded


def test_regularizer_grid_export(tmp_path, capsys):
    out_path = tmp_path / "grid.csv"
    code, out, _ = run(capsys, "regularizer", "--operator", "example35", "--prox", "soft:1",
                       "--grid", "-2:2:0.01", "--out", str(out_path))
    assert code == 0
    rows = list(csv.DictReader(out_path.open()))
    assert len(rows) == 401
    by_x = {float(r["x"]): r for r in rows}
    assert abs(float(by_x[1.0]["f_numeric"]) - 2.9) <= 1e-6
    assert float(by_x[0.0]["f_numeric"]) == 0.0
    worst = max(abs(float(r["f_numeric"]) - float(r["f_closed_form"])) for r in rows)
    assert worst <= 1e-6
    branch_marks = sorted(round(float(r["x"]), 2) for r in rows if r["at_branch"] == "1")
    assert branch_marks == [-0.4, 0.4]


def test_regularizer_json_format(capsys):
    code, out, _ = run(capsys, "regularizer", "--grid", "-1:1:0.5", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["x"]) == 5
    assert len(doc["f_numeric"]) == 5
    assert "f_closed_form" in doc


def test_regularizer_multidimensional_numeric_only(capsys):
    code, out, _ = run(capsys, "regularizer", "--operator", "random:5x3:2",
                       "--prox", "soft:1", "--grid", "-1:1:0.5")
    assert code == 0
    header = out.splitlines()[0]
    assert header == "x,f_numeric"


def test_solve_inline_vector(capsys):
    code, out, _ = run(capsys, "solve", "--operator", "example35", "--x", "1",
                       "--lambda", "1")
    assert code == 0
    lines = out.strip().splitlines()
    solve_doc = json.loads(lines[0])
    assert solve_doc["converged"] is True
    assert abs(solve_doc["minimizer"][0]) <= 1e-6
    frame_doc = json.loads(lines[1])
    assert abs(frame_doc["frame_prox"][0] - 0.4) <= 1e-12
    assert frame_doc["t_distance"] > 0.5


def test_solve_problem_file(tmp_path, capsys):
    prob = tmp_path / "prob.json"
    prob.write_text(json.dumps({"x": [2.0, 0.0, -1.0], "lambda": 0.5}))
    code, out, _ = run(capsys, "solve", "--operator", "identity:3", "--problem", str(prob))
    assert code == 0
    doc = json.loads(out.strip().splitlines()[0])
    np.testing.assert_allclose(doc["minimizer"], [1.5, 0.0, -0.5], atol=1e-8)


def test_operator_file_loading(tmp_path, capsys, rng):
    m = rng.standard_normal((5, 2))
    csv_path = tmp_path / "op.csv"
    json_path = tmp_path / "op.json"
    save_matrix_csv(m, csv_path)
    save_matrix_json(m, json_path)
    for path in (csv_path, json_path):
        code, out, _ = run(capsys, "verify", "--operator", str(path), "--prox", "soft:1",
                           "--trials", "10")
        assert code == 0


def test_example_command(capsys):
    code, out, _ = run(capsys, "example")
    assert code == 0
    assert "soft shrinkage" in out
    assert "branch point" in out
    assert "0.4" in out


def test_bench_command(capsys):
    code, out, _ = run(capsys, "bench", "--seed", "2")
    assert code == 0
    doc = json.loads(out)
    assert all(v >= 0 for v in doc.values())
    assert any(k.startswith("frame_prox") for k in doc)


def test_verify_csv_format(capsys):
    code, out, _ = run(capsys, "verify", "--operator", "identity:2", "--prox", "soft:1",
                       "--trials", "10", "--format", "csv")
    assert code == 0
    for line in out.strip().splitlines():
        assert len(line.split(",")) == 5


def test_no_subcommand_is_usage_error(capsys):
    assert main([]) == 2

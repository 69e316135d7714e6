from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import pytest

from helpers import d1
from rrsp import io as instio
from rrsp.cli import (
    EXIT_CAPACITY,
    EXIT_IO,
    EXIT_OK,
    EXIT_UNSUPPORTED,
    EXIT_USAGE,
    EXIT_VALIDATION,
    parse_path_spec,
    run,
)
from rrsp.graph import Multidigraph
from rrsp.model import ContinuousBudget, DiscreteBudget, Instance

TOOL = Path(__file__).parent / "tools" / "scipy_lp_solver.py"


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, unc in (("d1", None), ("d1c", ContinuousBudget(1.0)), ("d1d", DiscreteBudget(1))):
        path = tmp_path / f"{name}.json"
        instio.dump(d1(uncertainty=unc), path)
        out[name] = str(path)
    return out


def _lines(capsys):
    return capsys.readouterr().out.splitlines()


def test_solve_d1(files, capsys):
    assert run(["solve", files["d1"]]) == EXIT_OK
    out = _lines(capsys)
    assert out[:3] == ["value: 2", "method: asp", "structure: asp"]
    assert "first_stage_nodes: s a t" in out
    assert "second_stage_nodes: s b t" in out


@pytest.mark.parametrize("method", ["layered", "acyclic", "asp", "oracle"])
def test_solve_methods_agree(files, capsys, method):
    assert run(["solve", files["d1"], "--method", method]) == EXIT_OK
    assert _lines(capsys)[0] == "value: 2"


def test_solve_parallel_is_deterministic(files, capsys):
    run(["solve", files["d1"], "--method", "acyclic"])
    serial = capsys.readouterr().out
    run(["solve", files["d1"], "--method", "acyclic", "--parallel", "--workers", "3"])
    assert capsys.readouterr().out == serial


def test_timing_goes_to_stderr(files, capsys):
    run(["solve", files["d1"]])
    captured = capsys.readouterr()
    assert "wall_time" not in captured.out
    assert captured.err.startswith("wall_time: ")


@pytest.mark.parametrize("spec", ["0,2", "0 2", "s>a>t"])
def test_evaluate(files, capsys, spec):
    assert run(["evaluate", files["d1"], "--first-stage", spec]) == EXIT_OK
    out = _lines(capsys)
    assert out[0] == "value: 2"
    assert "recovery: 1 3" in out
    assert "scenario: 5 1 5 1" in out


def test_evaluate_rejects_non_path(files, capsys):
    assert run(["evaluate", files["d1"], "--first-stage", "0,3"]) == EXIT_VALIDATION
    assert run(["evaluate", files["d1"], "--first-stage", "s>t"]) == EXIT_VALIDATION
    assert run(["evaluate", files["d1"], "--first-stage", "x,y"]) == EXIT_VALIDATION


def test_parse_path_spec_parallel_arcs_pick_smallest_id():
    g = Multidigraph.from_arcs([(0, 1), (0, 1)], 0, 1, node_names=("s", "t"))
    assert parse_path_spec(g, "s>t") == (0,)


def test_approx_continuous(files, capsys):
    assert run(["approx", files["d1c"]]) == EXIT_OK
    out = _lines(capsys)
    assert "value: 2" in out and "exact: yes" in out
    assert "certificate: alpha" in out
    assert "certificate_beta: 4" in out and "certificate_gamma: 2" in out


def test_approx_discrete_zero_alpha(tmp_path, capsys):
    inst = d1(uncertainty=DiscreteBudget(1)).replace(nominal=[0, 1, 3, 1])
    path = tmp_path / "z.json"
    instio.dump(inst, path)
    assert run(["approx", str(path)]) == EXIT_OK
    out = _lines(capsys)
    assert "ratio: inf" in out and "certificate: none" in out


def test_export_mip_writes_lp(files, tmp_path, capsys):
    out = tmp_path / "m.lp"
    assert run(["export-mip", files["d1"], "--out", str(out)]) == EXIT_OK
    assert _lines(capsys)[:3] == ["model: rrsp_interval", "variables: 12 (8 binary)", "rows: 17"]
    assert out.read_text().startswith("\\ rrsp_interval\nMinimize\n")


def test_export_mip_solves_with_template(files, tmp_path, capsys):
    cmd = f"{sys.executable} {TOOL} {{input}} {{output}} {{timelimit}}"
    code = run(["export-mip", files["d1c"], "--out", str(tmp_path / "c.lp"),
                "--solve", "--solver-cmd", cmd, "--time-limit", "30"])
    assert code == EXIT_OK
    out = _lines(capsys)
    assert "objective: 2" in out and "valid: yes" in out
    assert "first_stage: 0 2" in out


def test_export_mip_interval_model_on_budgeted_instance(files, tmp_path, capsys):
    assert run(["export-mip", files["d1d"], "--out", str(tmp_path / "i.lp"),
                "--model", "interval"]) == EXIT_OK
    assert _lines(capsys)[0] == "model: rrsp_interval"


def test_export_mip_discrete_default_unsupported(files, tmp_path):
    assert run(["export-mip", files["d1d"], "--out", str(tmp_path / "x.lp")]) == EXIT_UNSUPPORTED


def test_export_mip_solve_without_solver(files, tmp_path, monkeypatch):
    monkeypatch.delenv("RRSP_SOLVER_CMD", raising=False)
    assert run(["export-mip", files["d1"], "--out", str(tmp_path / "x.lp"), "--solve"]) == EXIT_IO


def test_generate_then_solve(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert run(["generate", "--family", "asp", "--seed", "3", "--out", str(out),
                "--leaves", "6", "--k", "2", "--neighborhood", "sym"]) == EXIT_OK
    assert _lines(capsys) == [f"wrote {out}: n=5 m=6 k=2 kind=sym uncertainty=interval"]
    first = out.read_text()
    run(["generate", "--family", "asp", "--seed", "3", "--out", str(out),
         "--leaves", "6", "--k", "2", "--neighborhood", "sym"])
    assert out.read_text() == first
    assert run(["solve", str(out)]) == EXIT_OK


def test_generate_budgeted(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert run(["generate", "--family", "layered", "--seed", "1", "--out", str(out),
                "--uncertainty", "discrete", "--budget", "2"]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["uncertainty"] == {"kind": "discrete_budget", "budget": 2}


def test_bench_writes_csv(tmp_path, capsys):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps({"cases": [
        {"family": "layered", "seed": 0, "count": 2, "params": {"layers": 3, "width": 2},
         "k": [0, 1], "kinds": ["incl", "sym"], "methods": ["auto", "acyclic"]},
        {"family": "random_dag", "seed": 5, "count": 1, "params": {"n": 6, "uncertainty": "continuous"},
         "k": [1], "kinds": ["incl"], "methods": ["approx", "oracle"]},
    ]}))
    out = tmp_path / "bench.csv"
    assert run(["bench", "--suite", str(suite), "--out", str(out)]) == EXIT_OK
    assert _lines(capsys) == ["rows=18 compared=18 disagreements=0 errors=0"]
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 18 and all(r["agree"] == "1" for r in rows)


def test_bench_parallel_matches_serial(tmp_path, capsys):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps({"cases": [
        {"family": "asp", "seed": 0, "count": 3, "params": {"leaves": 8}, "k": [1, 2],
         "kinds": ["incl"], "methods": ["asp"]}]}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["bench", "--suite", str(suite), "--out", str(a)])
    run(["bench", "--suite", str(suite), "--out", str(b), "--workers", "2"])

    def strip(path):
        with open(path, newline="") as fh:
            return [{k: v for k, v in r.items() if k != "wall_time"} for r in csv.DictReader(fh)]
    assert strip(a) == strip(b)


def test_bench_rejects_unknown_params(tmp_path):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps({"cases": [{"family": "asp", "params": {"bogus": 1}}]}))
    assert run(["bench", "--suite", str(suite), "--out", str(tmp_path / "o.csv")]) == EXIT_VALIDATION


# -- exit codes ----------------------------------------------------------------

def test_usage_errors(capsys):
    assert run([]) == EXIT_USAGE
    assert run(["solve"]) == EXIT_USAGE
    assert run(["solve", "x.json", "--method", "magic"]) == EXIT_USAGE
    assert run(["frobnicate"]) == EXIT_USAGE


def test_help_exits_zero(capsys):
    assert run(["--help"]) == EXIT_OK
    assert "export-mip" in capsys.readouterr().out


def test_invalid_document(tmp_path, capsys):
    doc = instio.to_document(d1())
    doc["k"] = -1
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert run(["solve", str(path)]) == EXIT_VALIDATION
    assert "/k:" in capsys.readouterr().err


def test_unsupported_structure(tmp_path):
    bridge = Multidigraph.from_arcs([(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)], 0, 3)
    path = tmp_path / "bridge.json"
    instio.dump(Instance(bridge, [1] * 5, [1] * 5, [0] * 5, k=1), path)
    assert run(["solve", str(path), "--method", "asp"]) == EXIT_UNSUPPORTED
    assert run(["solve", str(path), "--method", "layered"]) == EXIT_UNSUPPORTED
    assert run(["solve", str(path)]) == EXIT_OK


def test_cyclic_graph_unsupported(tmp_path):
    g = Multidigraph.from_arcs([(0, 1), (1, 2), (2, 1), (2, 3)], 0, 3)
    path = tmp_path / "cyc.json"
    instio.dump(Instance(g, [1] * 4, [1] * 4, [0] * 4, k=1), path)
    assert run(["solve", str(path)]) == EXIT_UNSUPPORTED
    assert run(["solve", str(path), "--method", "oracle"]) == EXIT_OK


def test_path_cap_exceeded(tmp_path):
    arcs = []
    for i in range(14):
        a, b = 2 * i, 2 * i + 2
        arcs += [(a, a + 1), (a + 1, b), (a, b)]
    g = Multidigraph.from_arcs(arcs, 0, 28)
    m = len(arcs)
    path = tmp_path / "chain.json"
    instio.dump(Instance(g, [1] * m, [1] * m, [1] * m, k=2), path)
    assert run(["solve", str(path), "--method", "oracle"]) == EXIT_CAPACITY
    assert run(["solve", str(path)]) == EXIT_OK


def test_missing_file(capsys):
    assert run(["solve", "/nonexistent/instance.json"]) == EXIT_IO

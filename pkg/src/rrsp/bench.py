"""Benchmark sweeps: generate instances, run solvers, compare with the oracle.

A suite is a JSON document::

    {"cases": [{"family": "layered", "seed": 0, "count": 5,
                "params": {"layers": 4, "width": 3},
                "k": [0, 1, 2], "kinds": ["incl", "sym"],
                "methods": ["auto", "layered", "acyclic"],
                "oracle": true}]}

``params`` are :class:`~rrsp.gen.GenParams` fields.  Interval instances
accept the exact methods (auto, layered, acyclic, asp, oracle); budgeted
instances accept ``approx`` and ``oracle``.  For ``approx`` the ``agree``
column checks the certified ratio rather than equality.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

from .errors import RRSPError, TooManyPaths
from .gen import GenParams, generate
from .graph import ABS_TOL, REL_TOL, close
from .model import Interval

COLUMNS = ("instance_id", "family", "n", "m", "k", "kind", "uncertainty", "method",
           "value", "oracle_value", "wall_time", "agree", "error")
EXACT_METHODS = ("auto", "layered", "acyclic", "asp", "oracle")
DEFAULT_ORACLE_CAP = 2000


@dataclass
class Task:
    family: str
    seed: int
    params: dict
    ks: list
    kinds: list
    methods: list
    oracle: bool
    oracle_cap: int
    workers: int | None


def load_suite(path, workers=None):
    with open(path, encoding="utf-8") as fh:
        suite = json.load(fh)
    return tasks_from_suite(suite, workers)


def tasks_from_suite(suite, workers=None):
    allowed = {f.name for f in fields(GenParams)} - {"family", "seed"}
    tasks = []
    for i, case in enumerate(suite.get("cases", [])):
        params = dict(case.get("params", {}))
        unknown = set(params) - allowed
        if unknown:
            raise ValueError(f"case {i}: unknown params {sorted(unknown)}")
        for key in ("C_range", "c_hat_range", "delta_range", "k_range", "budget_range"):
            if key in params:
                params[key] = tuple(params[key])
        family = case["family"]
        GenParams(family=family, **params)  # fail early on bad ranges
        start = int(case.get("seed", 0))
        for seed in range(start, start + int(case.get("count", 1))):
            tasks.append(Task(family, seed, params, list(case.get("k", [1])),
                              list(case.get("kinds", ["incl"])),
                              list(case.get("methods", ["auto"])),
                              bool(case.get("oracle", True)),
                              int(case.get("oracle_cap", DEFAULT_ORACLE_CAP)), workers))
    return tasks


def _oracle_value(inst, cap):
    from .oracle import oracle_recrob, oracle_recsp
    try:
        if isinstance(inst.uncertainty, Interval):
            return oracle_recsp(inst, cap).value
        return oracle_recrob(inst, cap).value
    except TooManyPaths:
        return None


def _run_method(inst, method, workers):
    from .approx import approx_solve
    from .oracle import oracle_recrob
    from .recsolve import solve

    if isinstance(inst.uncertainty, Interval):
        if method not in EXACT_METHODS:
            raise ValueError(f"method {method!r} needs budgeted uncertainty")
        return solve(inst, method, workers=workers).value, 1.0
    if method == "approx":
        res = approx_solve(inst)
        return res.value, res.ratio
    if method == "oracle":
        return oracle_recrob(inst).value, 1.0
    raise ValueError(f"method {method!r} does not apply to budgeted uncertainty")


def run_task(task):
    """All rows for one generated instance."""
    base = generate(GenParams(family=task.family, seed=task.seed, **task.params))
    rows = []
    for k in task.ks:
        for kind in task.kinds:
            inst = base.replace(k=int(k), neighborhood=kind)
            ref = _oracle_value(inst, task.oracle_cap) if task.oracle else None
            for method in task.methods:
                row = {
                    "instance_id": f"{task.family}-s{task.seed}-k{k}-{inst.neighborhood.value}",
                    "family": task.family, "n": inst.graph.n, "m": inst.m, "k": int(k),
                    "kind": inst.neighborhood.value, "uncertainty": inst.uncertainty.kind,
                    "method": method, "value": "", "oracle_value": "" if ref is None else ref,
                    "wall_time": "", "agree": "", "error": "",
                }
                t0 = time.perf_counter()
                try:
                    value, ratio = _run_method(inst, method, task.workers)
                except RRSPError as exc:
                    row["error"] = type(exc).__name__
                    row["wall_time"] = f"{time.perf_counter() - t0:.6f}"
                    rows.append(row)
                    continue
                row["wall_time"] = f"{time.perf_counter() - t0:.6f}"
                row["value"] = value
                if ref is not None:
                    if ratio == 1.0:
                        ok = close(value, ref)
                    else:
                        ok = value <= ratio * ref + ABS_TOL + REL_TOL * abs(ref)
                    row["agree"] = int(ok)
                rows.append(row)
    return rows


def run_suite(tasks, workers=None):
    """Rows in task order; ``workers`` > 1 spreads instances over processes."""
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run_task, tasks))
    else:
        chunks = [run_task(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def write_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def summarize(rows):
    compared = [r for r in rows if r["agree"] != ""]
    return {
        "rows": len(rows),
        "compared": len(compared),
        "disagreements": sum(1 for r in compared if not r["agree"]),
        "errors": sum(1 for r in rows if r["error"]),
    }


"""Write both compact MIP models as LP files and, if a solver is configured, solve them.

Set RRSP_SOLVER_CMD to a template such as
``highs --model_file {input} --solution_file {output} --time_limit {timelimit}``
or use the bundled test tool::

    RRSP_SOLVER_CMD="python3 tests/tools/scipy_lp_solver.py {input} {output} {timelimit}" \
        python3 demos/mip_export.py
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

from rrsp import ContinuousBudget, Instance, Multidigraph
from rrsp.errors import SolverUnavailable
from rrsp.mip import ENV_SOLVER, build_continuous_budget_mip, build_interval_mip, export_lp, run_external_solver
from rrsp.oracle import oracle_recrob, oracle_recsp

g = Multidigraph.from_arcs([(0, 1), (0, 2), (1, 3), (2, 3)], 0, 3, node_names=("s", "a", "b", "t"))
inst = Instance(g, [0, 2, 0, 2], [3, 1, 3, 1], [2, 0, 2, 0], k=2)
budgeted = inst.replace(uncertainty=ContinuousBudget(1.0))

out = Path(tempfile.mkdtemp(prefix="rrsp_demo_"))
for name, model, ref in [("interval", build_interval_mip(inst), oracle_recsp(inst).value),
                         ("cont_budget", build_continuous_budget_mip(budgeted), oracle_recrob(budgeted).value)]:
    path = out / f"{name}.lp"
    export_lp(model, path)
    print(f"{name}: {model.num_vars} variables ({model.num_binaries} binary), {len(model.rows)} rows -> {path}")
    if not os.environ.get(ENV_SOLVER):
        continue
    try:
        res = run_external_solver(model, None, 60, model, budgeted if name == "cont_budget" else inst)
    except SolverUnavailable as exc:
        print("  solver unavailable:", exc)
        continue
    print(f"  solver objective {res.objective:g}, enumeration {ref:g}, "
          f"first stage {res.first_stage}, valid pair: {res.valid}")

print("\nfirst lines of the interval model:")
print("".join((out / "interval.lp").read_text().splitlines(True)[:6]))

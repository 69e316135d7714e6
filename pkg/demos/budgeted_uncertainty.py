"""Budgeted adversaries and the certified approximation.

Shows how the worst case grows with the adversary's budget and what ratio
the approximation can certify on a random instance.

    python3 demos/budgeted_uncertainty.py
"""

from __future__ import annotations

from rrsp import ContinuousBudget, DiscreteBudget
from rrsp.approx import approx_solve
from rrsp.gen import GenParams, generate
from rrsp.graph import enumerate_st_paths
from rrsp.oracle import oracle_recrob
from rrsp.secondstage import adversarial_interval, evaluate_objective

base = generate(GenParams(family="random_dag", n=8, arc_prob=0.4, seed=11, k_range=(1, 1),
                          c_hat_range=(1, 10)))
# the path most exposed to deviation makes the sweep interesting
x = max(enumerate_st_paths(base.graph), key=lambda p: (sum(base.deviation[e] for e in p), p))
total = float(base.deviation.sum())
print(f"instance: n={base.graph.n} m={base.m}, first-stage path {x}, total deviation {total:g}")
# with k=1 the recovery escapes along the undisturbed direct arc, so sweep without recovery
fixed = base.replace(k=0)

print("\ncontinuous budget sweep, k=0")
for budget in (0, 1, 2, 4, 8, total / 2, total):
    ev = evaluate_objective(fixed.replace(uncertainty=ContinuousBudget(budget)), x)
    print(f"  budget {budget:6.2f}: F = {ev.value:8.3f}")
print(f"  interval worst case:  {adversarial_interval(fixed, x).value:8.3f}")

print("\ndiscrete budget sweep, k=0")
for budget in range(0, min(base.m, 5) + 1):
    ev = evaluate_objective(fixed.replace(uncertainty=DiscreteBudget(budget)), x)
    print(f"  {budget} arcs may deviate: F = {ev.value:g}")

print("\napproximation against the exact optimum, k=1")
for unc in (ContinuousBudget(3.0), DiscreteBudget(2)):
    inst = base.replace(uncertainty=unc)
    res = approx_solve(inst)
    opt = oracle_recrob(inst).value
    certs = ", ".join(f"{k}={v:.3f}" for k, v in sorted(res.certificates.items()))
    print(f"  {unc.kind:18s} approx {res.value:g}, optimum {opt:g}, "
          f"observed {res.value / opt if opt else 1:.3f} <= certified {res.ratio:.3f} ({certs})")

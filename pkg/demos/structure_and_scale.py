"""Which solver handles which graph, and how far the series-parallel DP scales.

    python3 demos/structure_and_scale.py [leaves]
"""

from __future__ import annotations

import sys
import time

from rrsp import classify, solve
from rrsp.aspdp import solve_asp
from rrsp.gen import GenParams, generate
from rrsp.recsolve import solve_acyclic

for family, extra in [("layered", {"layers": 5, "width": 3}), ("asp", {"leaves": 40}),
                      ("random_dag", {"n": 12, "arc_prob": 0.35})]:
    inst = generate(GenParams(family=family, seed=3, k_range=(2, 2), **extra))
    sol = solve(inst)
    print(f"{family:10s} n={inst.graph.n:3d} m={inst.m:3d} class={classify(inst.graph).kind:8s}"
          f" -> {sol.method:8s} value {sol.value:g}")

leaves = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000
print(f"\nseries-parallel instance with {leaves} arcs, k=50")
inst = generate(GenParams(family="asp", leaves=leaves, seed=7, k_range=(50, 50)))
t0 = time.perf_counter()
sol = solve_asp(inst)
print(f"  tree DP: value {sol.value:g} in {time.perf_counter() - t0:.2f} s")

small = generate(GenParams(family="asp", leaves=1000, seed=7, k_range=(50, 50)))
t0 = time.perf_counter()
a = solve_asp(small).value
t1 = time.perf_counter()
b = solve_acyclic(small).value
t2 = time.perf_counter()
print(f"  1000-arc sibling: tree DP {a:g} ({t1 - t0:.3f} s), general DAG reduction {b:g} ({t2 - t1:.3f} s)")

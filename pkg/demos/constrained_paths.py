"""Cheapest path under a travel-time limit, swept over the limit.

    python3 demos/constrained_paths.py
"""

from __future__ import annotations

import random

from rrsp import Multidigraph
from rrsp.csp import CspInstance, solve_csp
from rrsp.errors import Infeasible

rng = random.Random(5)
n = 10
arcs = [(u, v) for u in range(n) for v in range(u + 1, min(n, u + 4))]
g = Multidigraph.from_arcs(arcs, 0, n - 1)
cost = [rng.randint(1, 20) for _ in arcs]
time = [rng.randint(0, 4) for _ in arcs]

print(f"{len(arcs)} arcs; total time {sum(time)}")
for limit in range(0, sum(time) + 1, 2):
    try:
        path, value = solve_csp(CspInstance(g, cost, time, limit))
    except Infeasible:
        print(f"  limit {limit:2d}: infeasible")
        continue
    used = sum(time[e] for e in path)
    print(f"  limit {limit:2d}: cost {value:4g} using time {used:2d} via {len(path)} arcs")

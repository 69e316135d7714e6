"""Two-route diamond: how the recovery budget changes the best plan.

Route s-a-t is free today but expensive tomorrow; route s-b-t is the
reverse.  With enough recovery budget the planner books the cheap route now
and switches tomorrow.

    python3 demos/diamond_walkthrough.py
"""

from __future__ import annotations

from rrsp import Instance, Multidigraph, classify, solve
from rrsp.oracle import oracle_recsp
from rrsp.secondstage import adversarial_interval

g = Multidigraph.from_arcs([(0, 1), (0, 2), (1, 3), (2, 3)], 0, 3, node_names=("s", "a", "b", "t"))
inst = Instance(g, first=[0, 2, 0, 2], nominal=[3, 1, 3, 1], deviation=[2, 0, 2, 0], k=2)

print("structure:", classify(g).kind)
print("second-stage worst costs:", inst.upper.tolist())


def route(ids):
    return "-".join([g.name(g.tails[ids[0]])] + [g.name(g.heads[e]) for e in ids])


print("\nvalue by neighborhood and budget")
for kind in ("incl", "excl", "sym"):
    for k in range(5):
        sol = solve(inst.replace(neighborhood=kind, k=k))
        ref = oracle_recsp(inst.replace(neighborhood=kind, k=k)).value
        print(f"  {kind:4s} k={k}: {sol.value:4g}  first {route(sol.first_stage)}"
              f"  then {route(sol.second_stage)}  ({sol.method}, enumeration says {ref:g})")

print("\nworst case for a fixed first stage, incl k=2")
for x in [(0, 2), (1, 3)]:
    ev = adversarial_interval(inst, x)
    print(f"  book {route(x)}: total {ev.value:g}, recover along {route(ev.recovery)}")

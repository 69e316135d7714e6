"""Vertex-disjoint paths encoded as recovery problems.

A yes-instance of the disjoint-paths question always yields gadget value 0.
The converse can fail on general digraphs: the first stage may visit the
terminal pairs out of order.  This script shows one of each.

    python3 demos/hardness_gadgets.py
"""

from __future__ import annotations

from rrsp.gen import (
    KVdpInstance,
    disjoint_paths_exist,
    gadget_incsp_excl,
    gadget_recrob_discrete,
    gadget_recsp_incl,
)
from rrsp.oracle import oracle_incremental, oracle_recrob, oracle_recsp


def report(title, kv):
    print(title)
    print(f"  disjoint paths exist: {disjoint_paths_exist(kv)}")
    rec = oracle_recsp(gadget_recsp_incl(kv))
    g = gadget_recsp_incl(kv).graph
    walk = [g.name(g.tails[rec.first_stage[0]])] + [g.name(g.heads[e]) for e in rec.first_stage]
    print(f"  recoverable gadget value {rec.value:g}, first stage {' '.join(walk)}")
    inst, h = gadget_incsp_excl(kv)
    print(f"  incremental gadget value {oracle_incremental(inst, h, inst.upper)[1]:g}")
    print(f"  discrete-budget gadget value {oracle_recrob(gadget_recrob_discrete(kv)).value:g}")


# 3x3 grid, arcs right and down; pairs (0,0)->(0,2) and (1,0)->(2,2)
idx = {(r, c): 3 * r + c for r in range(3) for c in range(3)}
grid = [(idx[r, c], idx[r, c + 1]) for r in range(3) for c in range(2)]
grid += [(idx[r, c], idx[r + 1, c]) for r in range(2) for c in range(3)]
report("grid with two routable pairs", KVdpInstance(9, grid, [(idx[0, 0], idx[0, 2]), (idx[1, 0], idx[2, 2])]))

print()
report("three pairs, G only links s1->t2, s3->t1, s2->t3",
       KVdpInstance(6, [(0, 3), (4, 1), (2, 5)], [(0, 1), (2, 3), (4, 5)]))

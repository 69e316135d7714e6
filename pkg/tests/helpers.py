"""Shared fixtures and small random-instance builders for the test suite."""

from __future__ import annotations

import random

from rrsp.graph import Multidigraph, reachable_from
from rrsp.model import Instance, Interval

# D1 arc ids: 0=(s,a) 1=(s,b) 2=(a,t) 3=(b,t); P1 = (0, 2), P2 = (1, 3)
P1 = (0, 2)
P2 = (1, 3)


def d1_graph():
    return Multidigraph.from_arcs([(0, 1), (0, 2), (1, 3), (2, 3)], 0, 3,
                                  node_names=("s", "a", "b", "t"))


def d1(k=2, neighborhood="incl", uncertainty=None):
    return Instance(d1_graph(), [0, 2, 0, 2], [3, 1, 3, 1], [2, 0, 2, 0], k=k,
                    neighborhood=neighborhood, uncertainty=uncertainty or Interval(), label="D1")


def a1(k=0, neighborhood="incl", uncertainty=None):
    g = Multidigraph.from_arcs([(0, 1)], 0, 1, node_names=("s", "t"))
    return Instance(g, [3], [2], [5], k=k, neighborhood=neighborhood,
                    uncertainty=uncertainty or Interval(), label="A1")


def n1(k=1, neighborhood="incl"):
    # f1=(s,a), f2=(a,t), f3=(s,t)
    g = Multidigraph.from_arcs([(0, 1), (1, 2), (0, 2)], 0, 2, node_names=("s", "a", "t"))
    return Instance(g, [0, 0, 9], [9, 9, 0], [0, 0, 0], k=k, neighborhood=neighborhood,
                    label="N1")


def random_dag(rng, n_max=12, m_max=20, parallel=True):
    """Forward arcs over ``0..n-1`` with s=0, t=n-1 reachable; built with ``random``."""
    while True:
        n = rng.randint(2, min(n_max, m_max + 1))
        arcs = [(i, i + 1) for i in range(n - 1)] if rng.random() < 0.5 else []
        target = rng.randint(max(1, len(arcs)), m_max)
        if not parallel:
            target = min(target, n * (n - 1) // 2)
        while len(arcs) < target:
            u = rng.randrange(n - 1)
            v = rng.randrange(u + 1, n)
            if parallel or (u, v) not in arcs:
                arcs.append((u, v))
        rng.shuffle(arcs)
        g = Multidigraph.from_arcs(arcs, 0, n - 1, n=n)
        if reachable_from(g, 0)[n - 1]:
            return g


def random_instance(rng, uncertainty=None, cost_max=10, **kw):
    g = random_dag(rng, **kw)
    m = g.m
    C = [rng.randint(0, cost_max) for _ in range(m)]
    ch = [rng.randint(0, cost_max) for _ in range(m)]
    dv = [rng.randint(0, cost_max) for _ in range(m)]
    return Instance(g, C, ch, dv, k=rng.randint(0, 4),
                    neighborhood=rng.choice(["incl", "excl", "sym"]),
                    uncertainty=uncertainty or Interval())


def seeded(seed):
    return random.Random(seed)

"""Constrained shortest paths on acyclic multidigraphs.

The core routine is a backward dynamic program over ``(node, remaining
budget)`` states.  Scanning out-arcs in id order and keeping the first arc
that reaches the minimum makes the returned path the lexicographically
smallest optimal one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, InvalidInstance
from .graph import ABS_TOL, INF, Multidigraph, reachable_from, topological_order


@dataclass(frozen=True)
class CspInstance:
    graph: Multidigraph
    cost: np.ndarray
    time: np.ndarray
    limit: int

    def __post_init__(self):
        cost = np.asarray(self.cost, dtype=float)
        time = np.asarray(self.time)
        if cost.shape != (self.graph.m,) or time.shape != (self.graph.m,):
            raise InvalidInstance("cost/time vectors must have one entry per arc")
        if time.size and (np.any(time < 0) or np.any(time != np.round(time))):
            raise InvalidInstance("transition times must be nonnegative integers")
        if self.limit < 0 or int(self.limit) != self.limit:
            raise InvalidInstance("time limit must be a nonnegative integer")
        object.__setattr__(self, "cost", cost)
        object.__setattr__(self, "time", time.astype(np.int64))
        object.__setattr__(self, "limit", int(self.limit))


def budget_dp(n, tails, heads, cost, delta, lo, hi, start, source, target, order,
              active=None):
    """Cheapest source->target path under an integer budget.

    A state holds the remaining budget ``b`` in ``[lo, hi]``; traversing arc
    ``e`` moves it to ``b - delta[e]`` (capped at ``hi``; falling below ``lo``
    is infeasible) and the path must end with ``b >= 0``.  Returns
    ``(arc tuple, value)``.  ``order`` is a topological order of the nodes.
    """
    tails = np.asarray(tails, dtype=np.int64)
    heads = np.asarray(heads, dtype=np.int64)
    cost = np.asarray(cost, dtype=float)
    delta = np.asarray(delta, dtype=np.int64)
    if not lo <= start <= hi:
        raise Infeasible("start budget outside the state range")
    width = hi - lo + 1
    budgets = np.arange(lo, hi + 1)
    best = np.full((n, width), INF)
    choice = np.full((n, width), -1, dtype=np.int64)
    best[target, budgets >= 0] = 0.0

    ids = np.arange(len(tails))
    by_tail = np.lexsort((ids, tails))
    sorted_tails = tails[by_tail]
    bounds = np.searchsorted(sorted_tails, np.arange(n + 1))
    for u in reversed(order):
        if u == target or (active is not None and not active[u]):
            continue
        arcs = by_tail[bounds[u]:bounds[u + 1]]
        if arcs.size == 0:
            continue
        new_b = budgets[None, :] - delta[arcs][:, None]
        valid = new_b >= lo
        col = np.minimum(np.maximum(new_b, lo), hi) - lo
        vals = best[heads[arcs][:, None], col]
        vals = np.where(valid, vals, INF) + cost[arcs][:, None]
        low = vals.min(axis=0)
        first = np.argmax(vals <= low + ABS_TOL, axis=0)
        pick = vals[first, np.arange(width)]
        finite = np.isfinite(low)
        best[u] = np.where(finite, pick, INF)
        choice[u] = np.where(finite, arcs[first], -1)

    if not np.isfinite(best[source, start - lo]):
        raise Infeasible("no path satisfies the budget")
    path = []
    u, b = source, start
    while u != target:
        e = int(choice[u, b - lo])
        path.append(e)
        b = min(b - int(delta[e]), hi)
        u = int(heads[e])
    return tuple(path), float(best[source, start - lo])


def solve_csp(inst):
    """Minimum-cost s-t path whose total transition time is at most the limit."""
    g = inst.graph
    order = topological_order(g)
    return budget_dp(g.n, g.tail_array, g.head_array, inst.cost, inst.time,
                     0, inst.limit, inst.limit, g.s, g.t, order,
                     active=reachable_from(g, g.s))


def solve_hop_constrained(g, cost, source, target, hops, order=None):
    """Cheapest source->target path with at most ``hops`` arcs."""
    if order is None:
        order = topological_order(g)
    if source == target:
        return (), 0.0
    return budget_dp(g.n, g.tail_array, g.head_array, cost, np.ones(g.m, dtype=np.int64),
                     0, hops, hops, source, target, order,
                     active=reachable_from(g, source))


def hop_tables(g, cost, source, max_hops):
    """Exact-hop shortest paths from ``source`` to every node.

    Returns ``(D, P)`` with ``D[h, v]`` the cheapest source->v path using
    exactly ``h`` arcs and ``P[h, v]`` its last arc.  On an acyclic graph every
    such walk is a simple path.
    """
    cost = np.asarray(cost, dtype=float)
    tails, heads = g.tail_array, g.head_array
    m = g.m
    D = np.full((max_hops + 1, g.n), INF)
    P = np.full((max_hops + 1, g.n), -1, dtype=np.int64)
    D[0, source] = 0.0
    ids = np.arange(m)
    for h in range(1, max_hops + 1):
        prev = D[h - 1, tails]
        live = np.isfinite(prev)
        if not live.any():
            break
        cand = np.where(live, prev + cost, INF)
        row = np.full(g.n, INF)
        np.minimum.at(row, heads, cand)
        ok = live & (cand <= row[heads] + ABS_TOL)
        pick = np.full(g.n, m)
        np.minimum.at(pick, heads[ok], ids[ok])
        has = pick < m
        D[h, has] = cand[pick[has]]
        P[h, has] = pick[has]
    return D, P


def at_most_tables(D):
    """Prefix minima over hop counts: ``(V, H)`` with ``V[l, v] = min_{h<=l} D[h, v]``
    and ``H[l, v]`` the smallest hop count achieving it."""
    V = np.empty_like(D)
    Hs = np.zeros(D.shape, dtype=np.int64)
    V[0] = D[0]
    for h in range(1, D.shape[0]):
        better = D[h] < V[h - 1] - ABS_TOL
        V[h] = np.where(better, D[h], V[h - 1])
        Hs[h] = np.where(better, h, Hs[h - 1])
    return V, Hs


def hop_path(g, P, target, hops):
    """Walk exact-hop predecessor pointers back from ``target``."""
    path = []
    v = target
    for h in range(hops, 0, -1):
        e = int(P[h, v])
        path.append(e)
        v = g.tails[e]
    path.reverse()
    return tuple(path)

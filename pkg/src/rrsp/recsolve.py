"""Exact Rec SP solvers (interval uncertainty) on acyclic multidigraphs.

Layered and general acyclic inputs are reduced to a constrained shortest
path problem on an auxiliary graph over the same nodes.  Each auxiliary arc
either stands for one original arc used by both stages (time 0), or for a
detour ``i -> j`` where the two stages take separate subpaths (time = the
number of recovery changes it may consume).  The time limit is ``k``.

Arc series-parallel inputs go to :mod:`rrsp.aspdp`.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .csp import at_most_tables, budget_dp, hop_path, hop_tables
from .errors import CycleDetected, InvalidInstance, UnsupportedStructure
from .graph import (
    ABS_TOL,
    INF,
    classify,
    dag_distances_from,
    layer_assignment,
    reachable_from,
    shortest_path_dag,
    topological_order,
    walk_back,
)
from .model import Interval, Neighborhood, Solution, check_instance, pair_value


def _require_interval(inst):
    if not isinstance(inst.uncertainty, Interval):
        raise InvalidInstance(
            "exact solvers handle interval uncertainty only; "
            "use approx or mip for budgeted sets")


def _order_or_unsupported(g):
    try:
        return topological_order(g)
    except CycleDetected as exc:
        raise UnsupportedStructure(f"graph is cyclic ({exc})") from exc


def solve_minmax_k0(inst):
    """k = 0: both stages share one path, the shortest under ``C + c_hat + delta``."""
    _require_interval(inst)
    g = inst.graph
    order = _order_or_unsupported(g)
    path, value = shortest_path_dag(g, inst.first + inst.upper, order=order)
    return Solution(path, path, pair_value(inst, path, path), "minmax", np.array(inst.upper))


# --------------------------------------------------------------------------
# distance tables

def all_pairs_dag(g, cost, order):
    """Cheapest i->j costs ``D`` and last-arc pointers ``P`` for every pair."""
    n = g.n
    D = np.full((n, n), INF)
    P = np.full((n, n), -1, dtype=np.int64)
    np.fill_diagonal(D, 0.0)
    tails = g.tails
    for v in order:
        col = D[:, v]
        pcol = P[:, v]
        for e in g.in_arcs[v]:
            cand = D[:, tails[e]] + cost[e]
            better = cand < col - ABS_TOL
            col[better] = cand[better]
            pcol[better] = e
        col[v] = 0.0
        pcol[v] = -1
    return D, P


def pair_path(g, P, i, j):
    """Walk an all-pairs pointer table back from ``j`` to ``i``."""
    path = []
    v = j
    while v != i:
        e = int(P[i, v])
        path.append(e)
        v = g.tails[e]
    path.reverse()
    return tuple(path)


def _hop_rows(g, cost, rows, max_hops):
    """At-most-``l``-arc costs from each source in ``rows``: shape (max_hops+1, len(rows), n)."""
    n, m = g.n, g.m
    by_head = np.argsort(g.head_array, kind="stable")
    heads_sorted = g.head_array[by_head]
    tails_sorted = g.tail_array[by_head]
    cost_sorted = np.asarray(cost, dtype=float)[by_head]
    targets, starts = np.unique(heads_sorted, return_index=True)
    B = len(rows)
    V = np.full((max_hops + 1, B, n), INF)
    cur = np.full((B, n), INF)
    cur[np.arange(B), rows] = 0.0
    V[0] = cur
    for h in range(1, max_hops + 1):
        nxt = np.full((B, n), INF)
        if m:
            cand = cur[:, tails_sorted] + cost_sorted[None, :]
            nxt[:, targets] = np.minimum.reduceat(cand, starts, axis=1)
        cur = nxt
        V[h] = np.minimum(V[h - 1], cur)
    return V


def _improving(V):
    """Mask of hop budgets that strictly lower the at-most cost (first finite included)."""
    imp = np.zeros(V.shape, dtype=bool)
    imp[1:] = V[1:] < V[:-1] - ABS_TOL
    return imp


# --------------------------------------------------------------------------
# auxiliary graph

@dataclass
class ReductionGraph:
    """Auxiliary CSP graph with per-arc provenance.

    ``orig[e] >= 0`` marks a shared arc; otherwise the arc is a detour from
    ``tails[e]`` to ``heads[e]`` whose first-stage subpath has at most ``xh[e]``
    arcs and second-stage subpath at most ``yh[e]`` arcs (``-1``: no bound).
    """

    n: int
    tails: np.ndarray
    heads: np.ndarray
    cost: np.ndarray
    time: np.ndarray
    orig: np.ndarray
    xh: np.ndarray
    yh: np.ndarray
    limit: int

    @property
    def size(self):
        return len(self.tails)


class _Builder:
    def __init__(self, n):
        self.n = n
        self.parts = []

    def add(self, tails, heads, cost, time, orig, xh, yh):
        tails = np.asarray(tails, dtype=np.int64)
        cnt = len(tails)
        def full(v):
            return np.broadcast_to(np.asarray(v, dtype=np.int64), (cnt,))
        self.parts.append((tails, np.asarray(heads, dtype=np.int64),
                           np.asarray(cost, dtype=float), full(time), full(orig),
                           full(xh), full(yh)))

    def build(self, limit):
        cols = list(zip(*self.parts)) if self.parts else [[]] * 7
        arrs = [np.concatenate(c) if len(c) else np.zeros(0) for c in cols]
        tails, heads, cost, time, orig, xh, yh = arrs
        return ReductionGraph(self.n, tails.astype(np.int64), heads.astype(np.int64),
                              cost.astype(float), time.astype(np.int64),
                              orig.astype(np.int64), xh.astype(np.int64),
                              yh.astype(np.int64), limit)


def _shared_arcs(inst, builder):
    """One time-0 arc per node pair: the cheapest ``C + c_bar`` among parallel arcs."""
    g = inst.graph
    both = inst.first + inst.upper
    best = {}
    for e in range(g.m):
        key = g.arc(e)
        if key not in best or both[e] < both[best[key]] - ABS_TOL:
            best[key] = e
    arcs = sorted(best.values())
    builder.add([g.tails[e] for e in arcs], [g.heads[e] for e in arcs],
                both[arcs], 0, arcs, -1, -1)


def _row_chunks(n, k, workers):
    size = max(1, min(n, 4_000_000 // max(1, (k + 1) * n)))
    if workers and workers > 1:
        size = max(1, min(size, -(-n // workers)))
    return [np.arange(a, min(n, a + size)) for a in range(0, n, size)]


def _detour_arcs(inst, k, kind, workers=None):
    """Emit the detour arcs of the general acyclic reduction, chunked by source."""
    g = inst.graph
    C, cbar = inst.first, inst.upper
    order = topological_order(g)
    n = g.n
    if kind is Neighborhood.INCL:
        Dx, _ = all_pairs_dag(g, C, order)
    elif kind is Neighborhood.EXCL:
        Dy, _ = all_pairs_dag(g, cbar, order)

    def work(rows):
        out = []
        not_self = np.ones((len(rows), n), dtype=bool)
        not_self[np.arange(len(rows)), rows] = False
        if kind is Neighborhood.INCL:
            Vy = _hop_rows(g, cbar, rows, k)
            imp = _improving(Vy) & not_self[None]
            base = Dx[rows]
            for l in range(1, k + 1):
                r, j = np.nonzero(imp[l] & np.isfinite(base))
                if r.size:
                    out.append((rows[r], j, base[r, j] + Vy[l][r, j], l, -1, -1, l))
        elif kind is Neighborhood.EXCL:
            Vx = _hop_rows(g, C, rows, k)
            imp = _improving(Vx) & not_self[None]
            base = Dy[rows]
            for l in range(1, k + 1):
                r, j = np.nonzero(imp[l] & np.isfinite(base))
                if r.size:
                    out.append((rows[r], j, Vx[l][r, j] + base[r, j], l, -1, l, -1))
        else:
            Vx = _hop_rows(g, C, rows, k)
            Vy = _hop_rows(g, cbar, rows, k)
            impx = _improving(Vx) & not_self[None]
            impy = _improving(Vy) & not_self[None]
            for u in range(1, k):
                if not impx[u].any():
                    continue
                for v in range(1, k - u + 1):
                    r, j = np.nonzero(impx[u] & impy[v])
                    if r.size:
                        out.append((rows[r], j, Vx[u][r, j] + Vy[v][r, j],
                                    u + v, -1, u, v))
        return out

    chunks = _row_chunks(n, k, workers)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, chunks))
    else:
        results = [work(c) for c in chunks]
    return [item for res in results for item in res]


def build_acyclic_reduction(inst, workers=None):
    g = inst.graph
    k = inst.k
    builder = _Builder(g.n)
    _shared_arcs(inst, builder)
    if k > 0:
        for item in _detour_arcs(inst, k, inst.neighborhood, workers):
            builder.add(*item)
    return builder.build(k)


def build_layered_reduction(inst, layers, k):
    """Layered reduction: detours between node pairs at most ``k`` layers apart.

    The detour takes the cheapest first-stage and second-stage subpaths
    without hop bounds (all i->j paths have the same length here); its time
    is the number of second-stage arcs it does not share with the first.
    """
    g = inst.graph
    order = topological_order(g)
    builder = _Builder(g.n)
    _shared_arcs(inst, builder)
    tables = None
    if k > 0:
        Dx, Px = all_pairs_dag(g, inst.first, order)
        Dy, Py = all_pairs_dag(g, inst.upper, order)
        tables = (Px, Py)
        h = np.asarray(layers)
        gap = h[None, :] - h[:, None]
        ii, jj = np.nonzero((gap >= 1) & (gap <= k) & np.isfinite(Dx))
        times = []
        for i, j in zip(ii.tolist(), jj.tolist()):
            x = set(pair_path(g, Px, i, j))
            y = pair_path(g, Py, i, j)
            times.append(sum(1 for e in y if e not in x))
        if len(ii):
            builder.add(ii, jj, Dx[ii, jj] + Dy[ii, jj], np.array(times), -1, -1, -1)
    return builder.build(k), tables


# --------------------------------------------------------------------------
# reconstruction

class _Splicer:
    """Turns detour arcs back into subpaths of the original graph."""

    def __init__(self, inst, order, tables=None):
        self.inst = inst
        self.order = order
        self.tables = tables
        self._cache = {}

    def _unbounded(self, stage, i, j):
        g = self.inst.graph
        if self.tables is not None:
            return pair_path(g, self.tables[stage], i, j)
        key = ("u", stage, i)
        if key not in self._cache:
            cost = self.inst.first if stage == 0 else self.inst.upper
            self._cache[key] = dag_distances_from(g, cost, i, self.order)[1]
        return walk_back(g, self._cache[key], i, j)

    def _bounded(self, stage, i, j, hops):
        g = self.inst.graph
        key = ("h", stage, i, hops)
        if key not in self._cache:
            cost = self.inst.first if stage == 0 else self.inst.upper
            D, P = hop_tables(g, cost, i, hops)
            _, H = at_most_tables(D)
            self._cache[key] = (P, H)
        P, H = self._cache[key]
        return hop_path(g, P, j, int(H[hops, j]))

    def subpath(self, stage, i, j, hops):
        if hops < 0:
            return self._unbounded(stage, i, j)
        return self._bounded(stage, i, j, hops)


def _solve_reduction(inst, red, order, tables=None):
    g = inst.graph
    reach = reachable_from(g, g.s)
    path, _ = budget_dp(red.n, red.tails, red.heads, red.cost, red.time,
                        0, red.limit, red.limit, g.s, g.t, order, active=reach)
    splice = _Splicer(inst, order, tables)
    x, y = [], []
    for a in path:
        o = int(red.orig[a])
        if o >= 0:
            x.append(o)
            y.append(o)
            continue
        i, j = int(red.tails[a]), int(red.heads[a])
        x.extend(splice.subpath(0, i, j, int(red.xh[a])))
        y.extend(splice.subpath(1, i, j, int(red.yh[a])))
    return tuple(x), tuple(y), path


def solve_layered(inst):
    """Rec SP on a layered graph via the constrained-shortest-path reduction.

    Excl coincides with Incl here and Sym with Incl at ``k // 2``, so a
    single Incl construction serves all three kinds.
    """
    _require_interval(inst)
    g = inst.graph
    layers = layer_assignment(g)
    if layers is None:
        raise UnsupportedStructure("graph is not layered")
    k = inst.k // 2 if inst.neighborhood is Neighborhood.SYM else inst.k
    order = topological_order(g)
    red, tables = build_layered_reduction(inst, layers, k)
    x, y, used = _solve_reduction(inst, red, order, tables)
    return Solution(x, y, pair_value(inst, x, y), "layered", np.array(inst.upper),
                    {"aux_arcs": red.size, "time_limit": k, "aux_path": used})


def solve_acyclic(inst, workers=None):
    """Rec SP on any acyclic graph.

    Incl detours pair the cheapest first-stage subpath with the cheapest
    second-stage subpath of at most ``l`` arcs (time ``l``); Excl swaps the
    roles; Sym bounds both sides by ``u`` and ``v`` arcs (time ``u + v``).
    Only hop budgets that strictly lower the subpath cost get an arc, which
    keeps the optimum unchanged.  ``workers > 1`` splits the per-source
    table work over threads; the result does not depend on it.
    """
    _require_interval(inst)
    g = inst.graph
    order = _order_or_unsupported(g)
    red = build_acyclic_reduction(inst, workers)
    x, y, used = _solve_reduction(inst, red, order)
    return Solution(x, y, pair_value(inst, x, y), "acyclic", np.array(inst.upper),
                    {"aux_arcs": red.size, "time_limit": inst.k, "aux_path": used})


def solve(inst, method="auto", workers=None):
    """Dispatch on structure: asp > layered > acyclic; k = 0 short-circuits."""
    _require_interval(inst)
    check_instance(inst)
    g = inst.graph
    if method == "oracle":
        from .oracle import oracle_recsp
        return oracle_recsp(inst)
    if method == "layered":
        return solve_layered(inst)
    if method == "acyclic":
        return solve_acyclic(inst, workers)
    if method == "asp":
        from .aspdp import solve_asp
        return solve_asp(inst)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    info = classify(g)
    if info.kind == "general":
        raise UnsupportedStructure("exact solving needs an acyclic graph; use the MIP export")
    if inst.k == 0:
        sol = solve_minmax_k0(inst)
    elif info.kind == "asp":
        from .aspdp import solve_asp
        sol = solve_asp(inst, info.tree)
    elif info.kind == "layered":
        sol = solve_layered(inst)
    else:
        sol = solve_acyclic(inst, workers)
    sol.info["structure"] = info.kind
    return sol

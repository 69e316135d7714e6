"""Brute-force reference solvers.

Everything here enumerates simple s-t paths outright, so it works on cyclic
graphs as well, and it refuses inputs with more than ``cap`` paths.
"""

from __future__ import annotations

import numpy as np

from .errors import Infeasible, InvalidInstance
from .graph import ABS_TOL, DEFAULT_PATH_CAP, enumerate_st_paths, path_cost
from .model import Interval, Neighborhood, Solution, neighborhood_contains
from .secondstage import evaluate_objective


def _first_min(values):
    """Index of the first entry within tolerance of the minimum."""
    values = np.asarray(values, dtype=float)
    low = values.min()
    if not np.isfinite(low):
        return None
    return int(np.flatnonzero(values <= low + ABS_TOL)[0])


def _incidence(paths, m):
    M = np.zeros((len(paths), m), dtype=np.int64)
    for i, p in enumerate(paths):
        M[i, list(p)] = 1
    return M


def oracle_recsp(inst, cap=DEFAULT_PATH_CAP):
    """Exact Rec SP (upper costs in stage two) over every ordered path pair."""
    if not isinstance(inst.uncertainty, Interval):
        raise InvalidInstance("oracle_recsp needs interval uncertainty")
    g = inst.graph
    paths = enumerate_st_paths(g, cap)
    if not paths:
        raise Infeasible("no s-t path")
    M = _incidence(paths, g.m)
    shared = M @ M.T
    size = M.sum(axis=1)
    added = size[None, :] - shared      # |Y \ X| with X on rows
    removed = size[:, None] - shared    # |X \ Y|
    kind = inst.neighborhood
    if kind is Neighborhood.INCL:
        ok = added <= inst.k
    elif kind is Neighborhood.EXCL:
        ok = removed <= inst.k
    else:
        ok = added + removed <= inst.k
    first = M @ inst.first
    second = M @ inst.upper
    total = np.where(ok, first[:, None] + second[None, :], np.inf)
    flat = _first_min(total.ravel())
    i, j = divmod(flat, len(paths))
    x, y = paths[i], paths[j]
    value = path_cost(inst.first, x) + path_cost(inst.upper, y)
    return Solution(x, y, value, "oracle", np.array(inst.upper),
                    {"paths": len(paths)})


def oracle_recrob(inst, cap=DEFAULT_PATH_CAP):
    """Exact min over first-stage paths of ``F(X)`` (any uncertainty kind)."""
    paths = enumerate_st_paths(inst.graph, cap)
    if not paths:
        raise Infeasible("no s-t path")
    evals = [evaluate_objective(inst, x, cap, all_paths=paths) for x in paths]
    i = _first_min([ev.value for ev in evals])
    ev = evals[i]
    return Solution(ev.first_stage, ev.recovery, ev.value, "oracle", ev.scenario,
                    {"paths": len(paths), "evaluation": ev.method})


def oracle_incremental(inst, x, scenario, cap=DEFAULT_PATH_CAP):
    """Cheapest ``Y`` in the neighborhood of ``x`` by listing all paths."""
    costs = np.asarray(getattr(scenario, "costs", scenario), dtype=float)
    cands = [y for y in enumerate_st_paths(inst.graph, cap)
             if neighborhood_contains(x, y, inst.neighborhood, inst.k)]
    if not cands:
        raise Infeasible("empty neighborhood")
    i = _first_min([path_cost(costs, y) for y in cands])
    return cands[i], path_cost(costs, cands[i])


def oracle_csp(inst, cap=DEFAULT_PATH_CAP):
    """Cheapest s-t path with total time within the limit, by filtering all paths."""
    paths = [p for p in enumerate_st_paths(inst.graph, cap)
             if sum(int(inst.time[e]) for e in p) <= inst.limit]
    if not paths:
        raise Infeasible("no path satisfies the time limit")
    i = _first_min([path_cost(inst.cost, p) for p in paths])
    return paths[i], path_cost(inst.cost, paths[i])

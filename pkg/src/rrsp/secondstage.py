"""Second-stage problems for a fixed first-stage path ``x``.

* incremental recovery: cheapest ``Y`` in the neighborhood of ``x`` under a
  known scenario;
* adversarial evaluation: the worst scenario against that recovery, which
  for plain intervals is simply the upper-bound scenario;
* ``F(x)`` under budgeted uncertainty, computed exactly at desk scale by
  enumerating the neighborhood (an LP for the continuous budget, a subset
  search for the discrete one).
"""

from __future__ import annotations

import itertools
from math import comb
from dataclasses import dataclass, field

import numpy as np

from .csp import budget_dp
from .errors import InvalidInstance, TooManyPaths
from .graph import (
    DEFAULT_PATH_CAP,
    enumerate_st_paths,
    is_acyclic,
    path_cost,
    reachable_from,
    topological_order,
)
from .model import (
    ContinuousBudget,
    DiscreteBudget,
    Interval,
    Neighborhood,
    Scenario,
    neighborhood_contains,
)
from .simplex import maximize

DEFAULT_SUBSET_CAP = 5_000_000


@dataclass
class Evaluation:
    value: float
    first_stage: tuple
    recovery: tuple
    scenario: np.ndarray
    method: str  # "dp" | "enumeration" | "enumeration+lp" | "enumeration+subsets"
    info: dict = field(default_factory=dict)


def _costs(scenario):
    return np.asarray(getattr(scenario, "costs", scenario), dtype=float)


def _check_path(g, x):
    x = tuple(int(e) for e in x)
    if not g.is_path(x):
        raise InvalidInstance(f"{list(x)} is not a simple s-t path")
    return x


def incremental_budget(kind, k, x, m):
    """Budget-DP parameters ``(delta, lo, hi, start)`` encoding ``Y in Phi(x, k)``.

    The state is the remaining slack.  Incl spends one unit per arc outside
    ``x``; Excl starts ``|x|`` in debt and earns one unit per arc of ``x``
    reused; Sym does both.  A path is admissible iff it ends with slack >= 0.
    """
    kind = Neighborhood.parse(kind)
    on_x = np.zeros(m, dtype=bool)
    on_x[list(x)] = True
    size = len(x)
    if kind is Neighborhood.INCL:
        return np.where(on_x, 0, 1), 0, k, k
    start = k - size
    if kind is Neighborhood.EXCL:
        # slack never decreases; anything >= 0 is as good as 0
        return np.where(on_x, -1, 0), start, max(start, 0), start
    return np.where(on_x, -1, 1), -size, k, start


def solve_incremental(inst, x, scenario, order=None):
    """Cheapest recovery ``Y`` in the neighborhood of ``x`` under ``scenario``.

    Returns ``(Y, value)``.  Needs an acyclic graph.
    """
    g = inst.graph
    x = _check_path(g, x)
    if order is None:
        order = topological_order(g)
    delta, lo, hi, start = incremental_budget(inst.neighborhood, inst.k, x, g.m)
    return budget_dp(g.n, g.tail_array, g.head_array, _costs(scenario), delta,
                     lo, hi, start, g.s, g.t, order, active=reachable_from(g, g.s))


def neighborhood_paths(inst, x, cap=DEFAULT_PATH_CAP, all_paths=None):
    """All ``Y`` in the neighborhood of ``x``, lexicographic order."""
    if all_paths is None:
        all_paths = enumerate_st_paths(inst.graph, cap)
    return [y for y in all_paths
            if neighborhood_contains(x, y, inst.neighborhood, inst.k)]


def _enumerated_incremental(inst, x, costs, cap):
    best = None
    for y in neighborhood_paths(inst, x, cap):
        v = path_cost(costs, y)
        if best is None or v < best[1] - 1e-9:
            best = (y, v)
    return best


def adversarial_interval(inst, x, cap=DEFAULT_PATH_CAP):
    """``F(x)`` under interval uncertainty: recover against the upper bounds."""
    g = inst.graph
    x = _check_path(g, x)
    upper = inst.upper
    if is_acyclic(g):
        y, v = solve_incremental(inst, x, upper)
        method = "dp"
    else:
        y, v = _enumerated_incremental(inst, x, upper, cap)
        method = "enumeration"
    first = path_cost(inst.first, x)
    return Evaluation(first + v, x, y, np.array(upper), method, {"first_cost": first})


def worst_continuous(nominal, deviation, paths, budget):
    """Max over ``u`` in the continuous budget set of ``min_i c_hat(Y_i) + u(Y_i)``.

    Solved as the LP ``max t`` s.t. ``t - u(Y_i) <= c_hat(Y_i)``,
    ``u <= deviation``, ``sum u <= budget``.  Returns ``(value, u)``.
    """
    m = len(nominal)
    support = sorted({e for y in paths for e in y if deviation[e] > 0})
    base = np.array([path_cost(nominal, y) for y in paths])
    if not support or budget <= 0:
        return float(base.min()), np.zeros(m)
    col = {e: j + 1 for j, e in enumerate(support)}
    nv = len(support) + 1
    rows = []
    rhs = []
    for y, b in zip(paths, base):
        r = np.zeros(nv)
        r[0] = 1.0
        for e in y:
            if e in col:
                r[col[e]] = -1.0
        rows.append(r)
        rhs.append(b)
    for e in support:
        r = np.zeros(nv)
        r[col[e]] = 1.0
        rows.append(r)
        rhs.append(deviation[e])
    r = np.zeros(nv)
    r[1:] = 1.0
    rows.append(r)
    rhs.append(budget)
    c = np.zeros(nv)
    c[0] = 1.0
    res = maximize(c, np.array(rows), np.array(rhs))
    u = np.zeros(m)
    u[support] = np.clip(res.x[1:], 0.0, deviation[support])
    return res.value, u


def worst_discrete(nominal, deviation, paths, budget, subset_cap=DEFAULT_SUBSET_CAP):
    """Max over arc sets ``B`` with ``|B| <= budget`` of ``min_i c_hat(Y_i) + dev(Y_i & B)``.

    Raising more arcs never lowers the minimum, so only sets of size
    ``min(budget, |support|)`` are scanned.  Returns ``(value, B)``.
    """
    support = sorted({e for y in paths for e in y if deviation[e] > 0})
    base = np.array([path_cost(nominal, y) for y in paths])
    size = min(int(budget), len(support))
    if size == 0:
        return float(base.min()), ()
    count = comb(len(support), size)
    if count > subset_cap:
        raise TooManyPaths(subset_cap)
    inc = np.zeros((len(paths), len(support)))
    pos = {e: j for j, e in enumerate(support)}
    for i, y in enumerate(paths):
        for e in y:
            if e in pos:
                inc[i, pos[e]] = 1.0
    inc *= deviation[support][None, :]
    best_val, best_set = -np.inf, ()
    combos = itertools.combinations(range(len(support)), size)
    while True:
        chunk = list(itertools.islice(combos, 4096))
        if not chunk:
            break
        sel = np.zeros((len(support), len(chunk)))
        idx = np.array(chunk)
        sel[idx.T, np.arange(len(chunk))[None, :]] = 1.0
        vals = (base[:, None] + inc @ sel).min(axis=0)
        j = int(np.argmax(vals))
        if vals[j] > best_val + 1e-12:
            best_val = float(vals[j])
            best_set = tuple(support[p] for p in chunk[j])
    return best_val, best_set


def evaluate_objective(inst, x, cap=DEFAULT_PATH_CAP, all_paths=None):
    """``F(x)``: first-stage cost plus the worst-case best recovery cost.

    ``all_paths`` may carry a precomputed list of every s-t path.
    """
    g = inst.graph
    x = _check_path(g, x)
    unc = inst.uncertainty
    if isinstance(unc, Interval):
        return adversarial_interval(inst, x, cap)
    paths = neighborhood_paths(inst, x, cap, all_paths)
    first = path_cost(inst.first, x)
    nominal, deviation = inst.nominal, inst.deviation
    if isinstance(unc, ContinuousBudget):
        worst, u = worst_continuous(nominal, deviation, paths, unc.budget)
        scen = nominal + u
        method = "enumeration+lp"
        info = {"raised": u}
    elif isinstance(unc, DiscreteBudget):
        worst, raised = worst_discrete(nominal, deviation, paths, unc.budget)
        scen = np.array(nominal)
        scen[list(raised)] += deviation[list(raised)]
        method = "enumeration+subsets"
        info = {"raised": raised}
    else:
        raise InvalidInstance(f"unknown uncertainty {unc!r}")
    # recovery against the witness; its cost may exceed ``worst`` only by LP round-off
    y = min(paths, key=lambda p: (round(path_cost(scen, p), 9), p))
    info["first_cost"] = first
    info["paths"] = len(paths)
    return Evaluation(first + worst, x, y, scen, method, info)


def nominal_value(inst, x):
    """``C(x)`` plus the best recovery under nominal costs."""
    x = _check_path(inst.graph, x)
    if is_acyclic(inst.graph):
        _, v = solve_incremental(inst, x, Scenario(inst.nominal))
    else:
        _, v = _enumerated_incremental(inst, x, inst.nominal, DEFAULT_PATH_CAP)
    return path_cost(inst.first, x) + v

from __future__ import annotations

import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from helpers import P1, P2, a1, d1, random_instance, seeded
from rrsp.errors import InvalidInstance, TooManyPaths
from rrsp.graph import Multidigraph, enumerate_st_paths, path_cost
from rrsp.model import ContinuousBudget, DiscreteBudget, Instance, Interval, Scenario, scenario_violations
from rrsp.oracle import oracle_incremental
from rrsp.secondstage import (
    adversarial_interval,
    evaluate_objective,
    neighborhood_paths,
    nominal_value,
    solve_incremental,
    worst_continuous,
    worst_discrete,
)


def test_incremental_fixtures():
    up = d1().upper
    assert solve_incremental(d1(k=2), P1, up) == (P2, 2.0)
    assert solve_incremental(d1(k=1), P1, up) == (P1, 10.0)
    for kind in ("incl", "excl", "sym"):
        assert solve_incremental(d1(k=0, neighborhood=kind), P2, Scenario(up)) == (P2, 2.0)


def test_incremental_rejects_non_paths():
    with pytest.raises(InvalidInstance):
        solve_incremental(d1(), (0, 3), d1().upper)


def test_incremental_matches_enumeration():
    rng = seeded(21)
    for _ in range(120):
        inst = random_instance(rng)
        paths = enumerate_st_paths(inst.graph)
        x = rng.choice(paths)
        costs = np.array([rng.randint(0, 9) for _ in range(inst.m)], dtype=float)
        for kind in ("incl", "excl", "sym"):
            for k in range(4):
                sub = inst.replace(k=k, neighborhood=kind)
                got = solve_incremental(sub, x, costs)
                assert got == oracle_incremental(sub, x, costs)


def test_adversarial_interval_fixtures():
    assert adversarial_interval(d1(k=2), P1).value == 2
    assert adversarial_interval(d1(k=2), P2).value == 6
    for k in range(3):
        ev = adversarial_interval(a1(k=k), (0,))
        assert ev.value == 10 and ev.method == "dp"
        assert ev.scenario.tolist() == [7]


def test_adversarial_interval_on_cyclic_graph_enumerates():
    g = Multidigraph.from_arcs([(0, 1), (1, 2), (2, 1), (1, 3), (2, 3)], 0, 3)
    inst = Instance(g, [0] * 5, [1, 1, 1, 5, 1], [0] * 5, k=2)
    ev = adversarial_interval(inst, (0, 3))
    assert ev.method == "enumeration"
    assert ev.recovery == (0, 1, 4) and ev.value == 3


def test_evaluate_continuous_fixtures():
    c1 = ContinuousBudget(1.0)
    assert evaluate_objective(d1(k=0, uncertainty=c1), P2).value == pytest.approx(6)
    assert evaluate_objective(d1(k=0, uncertainty=c1), P1).value == pytest.approx(7)
    ev = evaluate_objective(d1(k=2, uncertainty=c1), P1)
    assert ev.value == pytest.approx(2) and ev.method == "enumeration+lp"
    assert scenario_violations(d1(uncertainty=c1), ev.scenario) == []


def test_evaluate_discrete_fixture():
    ev = evaluate_objective(d1(k=0, uncertainty=DiscreteBudget(1)), P1)
    assert ev.value == 8 and ev.method == "enumeration+subsets"
    assert len(ev.info["raised"]) == 1 and ev.info["raised"][0] in (0, 2)


def test_evaluate_respects_cap():
    with pytest.raises(TooManyPaths):
        evaluate_objective(d1(k=2, uncertainty=ContinuousBudget(1.0)), P1, cap=1)


def _lp_reference(nominal, deviation, paths, budget):
    m = len(nominal)
    # variables: t, u_0..u_{m-1}; maximize t
    A, b = [], []
    for y in paths:
        row = np.zeros(m + 1)
        row[0] = 1
        row[1 + np.array(y)] = -1
        A.append(row)
        b.append(path_cost(nominal, y))
    row = np.zeros(m + 1)
    row[1:] = 1
    A.append(row)
    b.append(budget)
    bounds = [(None, None)] + [(0, d) for d in deviation]
    res = linprog(np.r_[-1.0, np.zeros(m)], A_ub=A, b_ub=b, bounds=bounds, method="highs")
    return -res.fun


def _discrete_reference(nominal, deviation, paths, budget):
    m = len(nominal)
    best = -np.inf
    for r in range(min(budget, m) + 1):
        for B in itertools.combinations(range(m), r):
            c = np.array(nominal, dtype=float)
            c[list(B)] += np.asarray(deviation)[list(B)]
            best = max(best, min(path_cost(c, y) for y in paths))
    return best


def test_worst_cases_match_independent_references():
    rng = seeded(31)
    for _ in range(80):
        inst = random_instance(rng, m_max=10)
        x = rng.choice(enumerate_st_paths(inst.graph))
        paths = neighborhood_paths(inst, x)
        budget = rng.randint(0, 6)
        v, u = worst_continuous(inst.nominal, inst.deviation, paths, float(budget))
        assert v == pytest.approx(_lp_reference(inst.nominal, inst.deviation, paths, budget), abs=1e-7)
        assert u.sum() <= budget + 1e-9 and np.all(u <= inst.deviation + 1e-9)
        v, B = worst_discrete(inst.nominal, inst.deviation, paths, budget)
        assert v == _discrete_reference(inst.nominal, inst.deviation, paths, budget)
        assert len(B) <= budget


def test_budgeted_values_between_nominal_and_interval():
    rng = seeded(41)
    for _ in range(60):
        inst = random_instance(rng, m_max=12)
        x = rng.choice(enumerate_st_paths(inst.graph))
        lo = nominal_value(inst, x)
        hi = adversarial_interval(inst, x).value
        for unc in (ContinuousBudget(float(rng.randint(0, 8))), DiscreteBudget(rng.randint(0, 3))):
            if isinstance(unc, DiscreteBudget) and unc.budget > inst.m:
                continue
            v = evaluate_objective(inst.replace(uncertainty=unc), x).value
            assert lo - 1e-7 <= v <= hi + 1e-7


def test_continuous_value_concave_in_budget():
    rng = seeded(51)
    for _ in range(30):
        inst = random_instance(rng, m_max=10)
        x = rng.choice(enumerate_st_paths(inst.graph))
        vals = [evaluate_objective(inst.replace(uncertainty=ContinuousBudget(float(b))), x).value
                for b in range(0, 13)]
        diffs = np.diff(vals)
        assert np.all(diffs >= -1e-7)
        assert np.all(np.diff(diffs) <= 1e-6)


def test_interval_evaluation_delegates():
    inst = d1(k=2)
    assert evaluate_objective(inst, P1).value == adversarial_interval(inst, P1).value
    assert isinstance(inst.uncertainty, Interval)

from __future__ import annotations

import numpy as np
import pytest
from scipy.optimize import linprog

from rrsp.simplex import maximize


def test_textbook_lp():
    # max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
    res = maximize([3, 5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    assert res.status == "optimal"
    assert res.value == pytest.approx(36)
    assert np.allclose(res.x, [2, 6])


def test_unbounded():
    res = maximize([1, 1], [[1, -1]], [1])
    assert res.status == "unbounded"


def test_degenerate_rhs_does_not_cycle():
    # a classic cycling example under the largest-coefficient rule
    c = [10, -57, -9, -24]
    A = [[0.5, -5.5, -2.5, 9], [0.5, -1.5, -0.5, 1], [1, 0, 0, 0]]
    res = maximize(c, A, [0, 0, 1])
    assert res.status == "optimal"
    assert res.value == pytest.approx(1.0)


def test_negative_rhs_rejected():
    with pytest.raises(ValueError):
        maximize([1], [[1]], [-1])


def test_matches_scipy_on_random_lps():
    rng = np.random.default_rng(0)
    for _ in range(200):
        rows, cols = rng.integers(1, 8), rng.integers(1, 8)
        A = rng.integers(-3, 6, size=(rows, cols)).astype(float)
        b = rng.integers(0, 10, size=rows).astype(float)
        c = rng.integers(-4, 8, size=cols).astype(float)
        ref = linprog(-c, A_ub=A, b_ub=b, bounds=(0, None), method="highs")
        res = maximize(c, A, b)
        if ref.status == 3:
            assert res.status == "unbounded"
            continue
        assert ref.status == 0
        assert res.status == "optimal"
        assert res.value == pytest.approx(-ref.fun, rel=1e-6, abs=1e-7)
        assert np.all(A @ res.x <= b + 1e-7) and np.all(res.x >= -1e-9)

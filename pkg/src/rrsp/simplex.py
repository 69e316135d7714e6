"""Small dense simplex for ``max c.x  s.t.  A x <= b, x >= 0`` with ``b >= 0``.

Because ``b`` is nonnegative the slack basis is feasible from the start, so
no phase one is needed.  Pivoting follows Bland's rule, which rules out
cycling on the degenerate LPs that path enumeration tends to produce.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL = 1e-9


@dataclass
class LpResult:
    value: float
    x: np.ndarray
    status: str  # "optimal" | "unbounded"
    iterations: int


def maximize(c, A, b, tol=TOL, max_iter=100_000):
    """Solve the LP with a full tableau and Bland's entering/leaving rule."""
    c = np.asarray(c, dtype=float)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    rows, cols = A.shape
    if np.any(b < -tol):
        raise ValueError("right-hand side must be nonnegative")

    # tableau: [A | I | b] with objective row [-c | 0 | 0]
    T = np.zeros((rows + 1, cols + rows + 1))
    T[:rows, :cols] = A
    T[:rows, cols:cols + rows] = np.eye(rows)
    T[:rows, -1] = np.maximum(b, 0.0)
    T[-1, :cols] = -c
    basis = list(range(cols, cols + rows))

    it = 0
    while True:
        if it >= max_iter:
            raise RuntimeError("simplex iteration limit reached")
        reduced = T[-1, :-1]
        entering = np.flatnonzero(reduced < -tol)
        if entering.size == 0:
            break
        j = int(entering[0])
        col = T[:rows, j]
        pos = col > tol
        if not pos.any():
            return LpResult(np.inf, np.zeros(cols), "unbounded", it)
        ratios = np.full(rows, np.inf)
        ratios[pos] = T[:rows, -1][pos] / col[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + tol)
        # Bland: among tied rows leave the smallest basic variable index
        i = int(min(ties, key=lambda r: basis[r]))
        T[i] /= T[i, j]
        factors = T[:, j].copy()
        factors[i] = 0.0
        T -= np.outer(factors, T[i])
        basis[i] = j
        it += 1

    x = np.zeros(cols + rows)
    x[basis] = T[:rows, -1]
    return LpResult(float(T[-1, -1]), x[:cols], "optimal", it)

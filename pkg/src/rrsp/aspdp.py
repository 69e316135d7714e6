"""Rec SP on arc series-parallel graphs by DP over the decomposition tree.

For a subgraph ``G_s`` of the tree the DP keeps

* ``star[l]``: cheapest pair ``(X, Y)`` inside ``G_s`` using exactly ``l``
  units of recovery budget (``|Y - X|``, ``|X - Y|`` or their sum);
* ``xlen[l]`` / ``ylen[l]``: cheapest first-stage (``C``) / second-stage
  (``c_bar``) path of exactly ``l`` arcs;
* ``xmin`` / ``ymin``: the unconstrained versions.

Series nodes combine by min-plus convolution, parallel nodes by elementwise
minima plus the cross terms where ``X`` and ``Y`` run through different
branches.  Nodes of equal height are processed together as numpy batches.
Witness pairs are rebuilt top-down by re-deriving each cell's argmin from
the children's tables, so no pointer arrays are stored.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInstance
from .graph import ABS_TOL, INF, asp_decompose, path_from_arcs
from .model import Interval, Neighborhood, Solution, pair_value


def _conv(A, B):
    """Row-wise min-plus convolution truncated to the row width."""
    width = A.shape[1]
    out = np.full(A.shape, INF)
    for j in range(width):
        np.minimum(out[:, j:], A[:, j:j + 1] + B[:, :width - j], out=out[:, j:])
    return out


class AspTables:
    """DP tables for every tree node; rows are tree node ids."""

    def __init__(self, tree, first, upper, k, kind):
        self.tree = tree
        self.k = k
        self.kind = kind
        N = tree.size
        K1 = k + 1
        m = len(first)
        self.need_x = kind in (Neighborhood.EXCL, Neighborhood.SYM)
        self.need_y = kind in (Neighborhood.INCL, Neighborhood.SYM)
        self.star = np.full((N, K1), INF)
        self.xmin = np.full(N, INF)
        self.ymin = np.full(N, INF)
        self.xlen = np.full((N, K1), INF) if self.need_x else None
        self.ylen = np.full((N, K1), INF) if self.need_y else None
        self.first = np.asarray(first, dtype=float)
        self.upper = np.asarray(upper, dtype=float)

        self.star[:m, 0] = self.first + self.upper
        self.xmin[:m] = self.first
        self.ymin[:m] = self.upper
        if k >= 1:
            if self.need_x:
                self.xlen[:m, 1] = self.first
            if self.need_y:
                self.ylen[:m, 1] = self.upper
        self._fill()

    def _fill(self):
        tree = self.tree
        labels = np.array([{"L": 0, "S": 1, "P": 2}[c] for c in tree.label], dtype=np.int8)
        left = np.asarray(tree.left, dtype=np.int64)
        right = np.asarray(tree.right, dtype=np.int64)
        heights = tree.heights
        order = np.argsort(heights, kind="stable")
        bounds = np.searchsorted(heights[order], np.arange(heights.max() + 2))
        for h in range(1, heights.max() + 1):
            level = order[bounds[h]:bounds[h + 1]]
            lab = labels[level]
            for code, fn in ((1, self._series), (2, self._parallel)):
                idx = level[lab == code]
                if idx.size:
                    fn(idx, left[idx], right[idx])

    def _series(self, idx, L, R):
        self.star[idx] = _conv(self.star[L], self.star[R])
        if self.need_x:
            self.xlen[idx] = _conv(self.xlen[L], self.xlen[R])
        if self.need_y:
            self.ylen[idx] = _conv(self.ylen[L], self.ylen[R])
        self.xmin[idx] = self.xmin[L] + self.xmin[R]
        self.ymin[idx] = self.ymin[L] + self.ymin[R]

    def _parallel(self, idx, L, R):
        best = np.minimum(self.star[L], self.star[R])
        for a, b in ((L, R), (R, L)):
            best = np.minimum(best, self._cross(a, b))
        self.star[idx] = best
        if self.need_x:
            self.xlen[idx] = np.minimum(self.xlen[L], self.xlen[R])
        if self.need_y:
            self.ylen[idx] = np.minimum(self.ylen[L], self.ylen[R])
        self.xmin[idx] = np.minimum(self.xmin[L], self.xmin[R])
        self.ymin[idx] = np.minimum(self.ymin[L], self.ymin[R])

    def _cross(self, a, b):
        """``X`` inside branch ``a`` and ``Y`` inside branch ``b`` (no shared arcs)."""
        if self.kind is Neighborhood.INCL:
            return self.xmin[a][:, None] + self.ylen[b]
        if self.kind is Neighborhood.EXCL:
            return self.xlen[a] + self.ymin[b][:, None]
        return _conv(self.xlen[a], self.ylen[b])

    # ------------------------------------------------------------------
    # witness reconstruction

    def witness(self, node, l):
        """Arc sets ``(X, Y)`` realizing ``star[node, l]``."""
        X, Y = [], []
        stack = [("star", node, l)]
        while stack:
            what, s, l = stack.pop()
            stack.extend(self._expand(what, s, l, X, Y))
        return X, Y

    def _expand(self, what, s, l, X, Y):
        tree = self.tree
        lab = tree.label[s]
        if lab == "L":
            e = tree.arc[s]
            if what in ("star", "xlen", "xmin"):
                X.append(e)
            if what in ("star", "ylen", "ymin"):
                Y.append(e)
            return []
        L, R = tree.left[s], tree.right[s]
        table = {"star": self.star, "xlen": self.xlen, "ylen": self.ylen}.get(what)
        if what in ("xmin", "ymin"):
            vec = self.xmin if what == "xmin" else self.ymin
            if lab == "S":
                return [(what, L, 0), (what, R, 0)]
            return [(what, _pick(vec[s], [(vec[L], L), (vec[R], R)]), 0)]
        target = table[s, l]
        if lab == "S":
            j = _pick(target, [(table[L, j] + table[R, l - j], j) for j in range(l + 1)])
            return [(what, L, j), (what, R, l - j)]
        options = [(table[L, l], [(what, L, l)]), (table[R, l], [(what, R, l)])]
        if what == "star":
            for a, b in ((L, R), (R, L)):
                options.extend(self._cross_options(a, b, l))
        return _pick(target, options)

    def _cross_options(self, a, b, l):
        if self.kind is Neighborhood.INCL:
            return [(self.xmin[a] + self.ylen[b, l], [("xmin", a, 0), ("ylen", b, l)])]
        if self.kind is Neighborhood.EXCL:
            return [(self.xlen[a, l] + self.ymin[b], [("xlen", a, l), ("ymin", b, 0)])]
        return [(self.xlen[a, j] + self.ylen[b, l - j], [("xlen", a, j), ("ylen", b, l - j)])
                for j in range(1, l)]


def _pick(target, options):
    """First option whose value matches ``target`` within tolerance."""
    tol = ABS_TOL * max(1.0, abs(target))
    for value, payload in options:
        if value <= target + tol:
            return payload
    raise AssertionError("table cell has no matching witness")


def solve_asp(inst, tree=None):
    """Rec SP on an arc series-parallel graph in ``O(m k^2)`` table work."""
    if not isinstance(inst.uncertainty, Interval):
        raise InvalidInstance("solve_asp handles interval uncertainty only")
    g = inst.graph
    if tree is None:
        tree = asp_decompose(g)
    tables = AspTables(tree, inst.first, inst.upper, inst.k, inst.neighborhood)
    row = tables.star[tree.root]
    low = row.min()
    l = int(np.flatnonzero(row <= low + ABS_TOL * max(1.0, abs(low)))[0])
    X, Y = tables.witness(tree.root, l)
    x = path_from_arcs(g, X)
    y = path_from_arcs(g, Y)
    return Solution(x, y, pair_value(inst, x, y), "asp", np.array(inst.upper),
                    {"budget_used": l, "tree_nodes": tree.size})

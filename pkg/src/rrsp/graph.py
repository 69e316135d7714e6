"""Multidigraph container, structure recognition and basic path routines.

Arcs are identified by dense integer ids ``0..m-1``; parallel arcs are
distinct ids.  A path is a plain tuple of arc ids.
"""

from __future__ import annotations

import heapq
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import CycleDetected, NotSeriesParallel, TooManyPaths, Unreachable

INF = math.inf
ABS_TOL = 1e-9
REL_TOL = 1e-6
DEFAULT_PATH_CAP = 10_000


def close(a, b, rel=REL_TOL, abs_=ABS_TOL):
    """Value comparison used for cross-solver agreement."""
    if a == b:
        return True
    return math.isclose(a, b, rel_tol=rel, abs_tol=abs_)


@dataclass(frozen=True)
class Multidigraph:
    n: int
    tails: tuple
    heads: tuple
    s: int
    t: int
    node_names: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "tails", tuple(int(u) for u in self.tails))
        object.__setattr__(self, "heads", tuple(int(v) for v in self.heads))
        if len(self.tails) != len(self.heads):
            raise ValueError("tails and heads differ in length")
        if not (0 <= self.s < self.n and 0 <= self.t < self.n):
            raise ValueError("source/sink out of range")
        if self.s == self.t:
            raise ValueError("source and sink must differ")
        for u, v in zip(self.tails, self.heads):
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"arc ({u},{v}) references a missing node")
        if self.node_names is not None:
            names = tuple(str(x) for x in self.node_names)
            if len(names) != self.n or len(set(names)) != self.n:
                raise ValueError("node_names must be n distinct labels")
            object.__setattr__(self, "node_names", names)

    @classmethod
    def from_arcs(cls, arcs, s, t, n=None, node_names=None):
        arcs = list(arcs)
        if n is None:
            n = 1 + max([s, t] + [max(a) for a in arcs])
        return cls(n, [a[0] for a in arcs], [a[1] for a in arcs], s, t, node_names)

    @property
    def m(self):
        return len(self.tails)

    def arc(self, e):
        return self.tails[e], self.heads[e]

    def name(self, v):
        return self.node_names[v] if self.node_names else str(v)

    @cached_property
    def out_arcs(self):
        out = [[] for _ in range(self.n)]
        for e, u in enumerate(self.tails):
            out[u].append(e)
        return tuple(tuple(a) for a in out)

    @cached_property
    def in_arcs(self):
        inn = [[] for _ in range(self.n)]
        for e, v in enumerate(self.heads):
            inn[v].append(e)
        return tuple(tuple(a) for a in inn)

    @cached_property
    def tail_array(self):
        a = np.asarray(self.tails, dtype=np.int64)
        a.setflags(write=False)
        return a

    @cached_property
    def head_array(self):
        a = np.asarray(self.heads, dtype=np.int64)
        a.setflags(write=False)
        return a

    def with_terminals(self, s, t):
        return Multidigraph(self.n, self.tails, self.heads, s, t, self.node_names)

    def path_nodes(self, path, start=None):
        """Node sequence visited by ``path`` (``[start]`` for an empty path)."""
        if not path:
            return [self.s if start is None else start]
        nodes = [self.tails[path[0]]]
        for e in path:
            nodes.append(self.heads[e])
        return nodes

    def is_path(self, path, start=None, end=None):
        """True when ``path`` is a simple start-end path (defaults s and t)."""
        start = self.s if start is None else start
        end = self.t if end is None else end
        if not path:
            return start == end
        cur = start
        seen = {start}
        for e in path:
            if not 0 <= e < self.m or self.tails[e] != cur:
                return False
            cur = self.heads[e]
            if cur in seen:
                return False
            seen.add(cur)
        return cur == end


def path_cost(cost, path):
    return float(sum(cost[e] for e in path))


def path_from_arcs(g, arcs, start=None, end=None):
    """Order an arc set into a start-end path; ValueError if it is not one."""
    start = g.s if start is None else start
    end = g.t if end is None else end
    by_tail = {}
    for e in arcs:
        u = g.tails[e]
        if u in by_tail:
            raise ValueError(f"two selected arcs leave node {u}")
        by_tail[u] = e
    path = []
    cur = start
    while cur != end:
        if cur not in by_tail:
            raise ValueError(f"selected arcs do not continue from node {cur}")
        e = by_tail.pop(cur)
        path.append(e)
        cur = g.heads[e]
        if len(path) > len(arcs):
            raise ValueError("selected arcs contain a cycle")
    if by_tail:
        raise ValueError("selected arcs contain arcs off the path")
    path = tuple(path)
    if not g.is_path(path, start, end):
        raise ValueError("selected arcs do not form a simple path")
    return path


# --------------------------------------------------------------------------
# orderings and classes

def _find_cycle(g, candidates):
    cand = set(candidates)
    color = {}
    for root in sorted(cand):
        if root in color:
            continue
        stack = [(root, iter(g.out_arcs[root]))]
        color[root] = 1
        onstack = [root]
        while stack:
            u, it = stack[-1]
            for e in it:
                v = g.heads[e]
                if v not in cand:
                    continue
                if color.get(v) == 1:
                    return onstack[onstack.index(v):] + [v]
                if v not in color:
                    color[v] = 1
                    onstack.append(v)
                    stack.append((v, iter(g.out_arcs[v])))
                    break
            else:
                stack.pop()
                color[onstack.pop()] = 2
    return []


def topological_order(g):
    """Kahn's algorithm, smallest ready node first.

    Raises CycleDetected carrying a witness cycle (first node repeated at the end).
    """
    indeg = [len(a) for a in g.in_arcs]
    ready = [v for v in range(g.n) if indeg[v] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        u = heapq.heappop(ready)
        order.append(u)
        for e in g.out_arcs[u]:
            v = g.heads[e]
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(ready, v)
    if len(order) != g.n:
        rest = [v for v in range(g.n) if indeg[v] > 0]
        raise CycleDetected(_find_cycle(g, rest))
    return order


def is_acyclic(g):
    try:
        topological_order(g)
    except CycleDetected:
        return False
    return True


def layer_assignment(g):
    """Layer index per node with ``h(head) = h(tail) + 1`` on every arc, or None.

    Each weakly connected component is layered independently; layers are
    shifted so the component containing ``s`` starts at 0 at its lowest node.
    """
    h = [None] * g.n
    for root in [g.s] + list(range(g.n)):
        if h[root] is not None:
            continue
        h[root] = 0
        queue = deque([root])
        comp = [root]
        while queue:
            u = queue.popleft()
            for e in g.out_arcs[u]:
                v = g.heads[e]
                if h[v] is None:
                    h[v] = h[u] + 1
                    queue.append(v)
                    comp.append(v)
                elif h[v] != h[u] + 1:
                    return None
            for e in g.in_arcs[u]:
                w = g.tails[e]
                if h[w] is None:
                    h[w] = h[u] - 1
                    queue.append(w)
                    comp.append(w)
                elif h[w] != h[u] - 1:
                    return None
        low = min(h[v] for v in comp)
        for v in comp:
            h[v] -= low
    return h


def is_layered(g):
    return layer_assignment(g) is not None


@dataclass
class DecompositionTree:
    """Binary series-parallel decomposition tree.

    Node ``i < m`` is the leaf of arc ``i``.  Children always have smaller
    indices than their parent, so ascending index order is a valid bottom-up
    order.  ``source``/``sink`` are the terminals of each subgraph in ``G``.
    """

    label: list
    left: list
    right: list
    arc: list
    source: list
    sink: list
    root: int

    @property
    def size(self):
        return len(self.label)

    @property
    def num_leaves(self):
        return sum(1 for x in self.label if x == "L")

    def leaves_under(self, node):
        out = []
        stack = [node]
        while stack:
            x = stack.pop()
            if self.label[x] == "L":
                out.append(self.arc[x])
            else:
                stack.append(self.right[x])
                stack.append(self.left[x])
        return out

    @cached_property
    def heights(self):
        h = np.zeros(self.size, dtype=np.int64)
        for i, lab in enumerate(self.label):
            if lab != "L":
                h[i] = 1 + max(h[self.left[i]], h[self.right[i]])
        return h

    def rebuild(self):
        """Recompose a graph from the tree alone.

        Returns ``(n, arcs)`` where ``arcs[e] = (tail, head)`` over fresh node
        labels; node 0 is the source and node 1 the sink.
        """
        m = self.num_leaves
        arcs = [None] * m
        fresh = 2
        stack = [(self.root, 0, 1)]
        while stack:
            x, a, b = stack.pop()
            lab = self.label[x]
            if lab == "L":
                arcs[self.arc[x]] = (a, b)
            elif lab == "P":
                stack.append((self.left[x], a, b))
                stack.append((self.right[x], a, b))
            else:
                mid = fresh
                fresh += 1
                stack.append((self.left[x], a, mid))
                stack.append((self.right[x], mid, b))
        return fresh, arcs

    def render(self, node=None):
        node = self.root if node is None else node
        lab = self.label[node]
        if lab == "L":
            return f"e{self.arc[node]}"
        return f"{lab}({self.render(self.left[node])}, {self.render(self.right[node])})"


def asp_decompose(g):
    """Decompose a two-terminal arc series-parallel multidigraph.

    Works by repeated reductions: every bundle of parallel arcs and every
    maximal chain through in/out-degree-1 inner nodes is replaced by a single
    super-arc, merged as a balanced subtree so the tree height stays
    logarithmic per round.  The graph is ASP with terminals ``g.s``, ``g.t``
    iff this ends in a single ``s -> t`` super-arc.
    """
    if g.m == 0:
        raise NotSeriesParallel("graph has no arcs")
    if not is_acyclic(g):
        raise NotSeriesParallel("graph is cyclic")
    label = ["L"] * g.m
    left = [-1] * g.m
    right = [-1] * g.m
    arcnode = list(range(g.m))
    source = list(g.tails)
    sink = list(g.heads)

    def new_node(lab, a, b):
        label.append(lab)
        left.append(a)
        right.append(b)
        arcnode.append(-1)
        source.append(source[a])
        sink.append(sink[b])
        return len(label) - 1

    def balanced(items, lab):
        if len(items) == 1:
            return items[0]
        mid = len(items) // 2
        return new_node(lab, balanced(items[:mid], lab), balanced(items[mid:], lab))

    # live super-arcs are tree node ids
    out = defaultdict(set)
    inn = defaultdict(set)
    for e in range(g.m):
        out[source[e]].add(e)
        inn[sink[e]].add(e)

    def remove(x):
        out[source[x]].discard(x)
        inn[sink[x]].discard(x)

    def add(x):
        out[source[x]].add(x)
        inn[sink[x]].add(x)

    changed = True
    while changed:
        changed = False
        groups = defaultdict(list)
        for u in list(out):
            for x in out[u]:
                groups[(u, sink[x])].append(x)
        for key in sorted(groups):
            items = groups[key]
            if len(items) > 1:
                items.sort()
                for x in items:
                    remove(x)
                add(balanced(items, "P"))
                changed = True

        def inner(v):
            return v != g.s and v != g.t and len(inn[v]) == 1 and len(out[v]) == 1

        done = set()
        for v in sorted(k for k in list(inn) if inner(k)):
            if v in done or not inner(v):
                continue
            start = v
            while True:
                (x,) = inn[start]
                p = source[x]
                if inner(p) and p != v and p not in done:
                    start = p
                else:
                    break
            (first,) = inn[start]
            chain = [first]
            cur = start
            while inner(cur) and cur not in done:
                done.add(cur)
                (x,) = out[cur]
                chain.append(x)
                cur = sink[x]
            if source[chain[0]] == sink[chain[-1]]:
                raise NotSeriesParallel("series reduction closes a cycle")
            for x in chain:
                remove(x)
            add(balanced(chain, "S"))
            changed = True

    live = [x for u in out for x in out[u]]
    if len(live) != 1:
        raise NotSeriesParallel(f"reduction stalls with {len(live)} super-arcs")
    root = live[0]
    if source[root] != g.s or sink[root] != g.t:
        raise NotSeriesParallel("series-parallel terminals differ from s and t")
    return DecompositionTree(label, left, right, arcnode, source, sink, root)


def is_asp(g):
    try:
        asp_decompose(g)
    except NotSeriesParallel:
        return False
    return True


@dataclass
class StructureClass:
    kind: str  # "asp" | "layered" | "acyclic" | "general"
    layers: list | None = None
    tree: DecompositionTree | None = field(default=None, repr=False)

    @property
    def acyclic(self):
        return self.kind != "general"


def classify(g):
    """Most specific class under the precedence asp > layered > acyclic > general."""
    if not is_acyclic(g):
        return StructureClass("general")
    layers = layer_assignment(g)
    try:
        tree = asp_decompose(g)
    except NotSeriesParallel:
        tree = None
    if tree is not None:
        return StructureClass("asp", layers, tree)
    if layers is not None:
        return StructureClass("layered", layers)
    return StructureClass("acyclic")


# --------------------------------------------------------------------------
# distances and paths

def min_hop_matrix(g):
    """``L[i, j]`` = fewest arcs on an i->j path, ``inf`` when unreachable."""
    topological_order(g)
    L = np.full((g.n, g.n), INF)
    for i in range(g.n):
        L[i, i] = 0
        queue = deque([i])
        while queue:
            u = queue.popleft()
            for e in g.out_arcs[u]:
                v = g.heads[e]
                if L[i, v] == INF:
                    L[i, v] = L[i, u] + 1
                    queue.append(v)
    return L


def reachable_from(g, source):
    seen = [False] * g.n
    seen[source] = True
    stack = [source]
    while stack:
        u = stack.pop()
        for e in g.out_arcs[u]:
            v = g.heads[e]
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    return seen


def reaching(g, target):
    seen = [False] * g.n
    seen[target] = True
    stack = [target]
    while stack:
        v = stack.pop()
        for e in g.in_arcs[v]:
            u = g.tails[e]
            if not seen[u]:
                seen[u] = True
                stack.append(u)
    return seen


def shortest_path_dag(g, cost, source=None, target=None, order=None):
    """Cheapest source->target path in an acyclic graph; costs may be negative.

    The DP runs backwards from ``target`` so that, scanning out-arcs in id
    order, the first arc reaching the minimum gives the lexicographically
    smallest optimal arc sequence.
    """
    source = g.s if source is None else source
    target = g.t if target is None else target
    if order is None:
        order = topological_order(g)
    best = [INF] * g.n
    nxt = [-1] * g.n
    best[target] = 0.0
    heads = g.heads
    for u in reversed(order):
        if u == target:
            continue
        b = INF
        choice = -1
        for e in g.out_arcs[u]:
            bv = best[heads[e]]
            if bv == INF:
                continue
            c = cost[e] + bv
            if c < b - ABS_TOL:
                b, choice = c, e
        best[u] = b
        nxt[u] = choice
    if best[source] == INF:
        raise Unreachable(f"node {target} is unreachable from {source}")
    path = []
    u = source
    while u != target:
        e = nxt[u]
        path.append(e)
        u = heads[e]
    return tuple(path), float(best[source])


def enumerate_st_paths(g, cap=DEFAULT_PATH_CAP, source=None, target=None):
    """All simple source->target paths in lexicographic arc-id order.

    Works on cyclic graphs too.  Raises TooManyPaths once more than ``cap``
    paths exist.
    """
    source = g.s if source is None else source
    target = g.t if target is None else target
    useful = reaching(g, target)
    if not useful[source]:
        return []
    paths = []
    on_path = [False] * g.n
    on_path[source] = True
    arcs = []
    stack = [iter(g.out_arcs[source])]
    while stack:
        for e in stack[-1]:
            v = g.heads[e]
            if on_path[v] or not useful[v]:
                continue
            if v == target:
                paths.append(tuple(arcs) + (e,))
                if len(paths) > cap:
                    raise TooManyPaths(cap)
                continue
            on_path[v] = True
            arcs.append(e)
            stack.append(iter(g.out_arcs[v]))
            break
        else:
            stack.pop()
            if arcs:
                on_path[g.heads[arcs.pop()]] = False
    return paths


def dag_distances_from(g, cost, source, order):
    """Forward DP: cheapest source->v cost and last arc for every node v."""
    dist = [INF] * g.n
    pred = [-1] * g.n
    dist[source] = 0.0
    heads = g.heads
    started = False
    for u in order:
        if u == source:
            started = True
        if not started or dist[u] == INF:
            continue
        du = dist[u]
        for e in g.out_arcs[u]:
            v = heads[e]
            c = du + cost[e]
            if c < dist[v] - ABS_TOL:
                dist[v] = c
                pred[v] = e
    return dist, pred


def walk_back(g, pred, source, target):
    path = []
    v = target
    while v != source:
        e = pred[v]
        path.append(e)
        v = g.tails[e]
    path.reverse()
    return tuple(path)

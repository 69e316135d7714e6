"""Seeded instance generators: graph families and vertex-disjoint-path gadgets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RRSPError
from .graph import Multidigraph, is_acyclic, is_asp, is_layered
from .model import (
    ContinuousBudget,
    DiscreteBudget,
    Instance,
    Interval,
    Neighborhood,
    validate_instance,
)

FAMILIES = ("layered", "random_dag", "asp")


class GenerationFailed(RRSPError):
    pass


@dataclass(frozen=True)
class GenParams:
    """Family, size and cost ranges for :func:`generate`.

    Integer ranges are inclusive.  ``neighborhood="random"`` draws a kind
    per instance; ``uncertainty`` is one of interval, discrete, continuous.
    """

    family: str = "random_dag"
    n: int = 8                  # random_dag
    arc_prob: float = 0.3
    max_arcs: int | None = None
    layers: int = 4             # layered
    width: int = 3
    density: float = 0.5
    leaves: int = 8             # asp
    series_bias: float = 0.5
    parallel_prob: float = 0.0  # extra parallel copies (layered, random_dag)
    C_range: tuple = (0, 10)
    c_hat_range: tuple = (0, 10)
    delta_range: tuple = (0, 10)
    integral: bool = True
    k_range: tuple = (0, 4)
    neighborhood: str = "incl"
    uncertainty: str = "interval"
    budget_range: tuple = (0, 5)
    seed: int = 0
    max_tries: int = 100

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        for name in ("C_range", "c_hat_range", "delta_range", "k_range", "budget_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} is empty")
        if self.c_hat_range[0] < 0 or self.delta_range[0] < 0 or self.k_range[0] < 0:
            raise ValueError("nominal costs, deviations and k must be nonnegative")
        for name in ("arc_prob", "density"):
            if not 0 < getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in (0, 1]")
        if not 0 <= self.series_bias <= 1 or not 0 <= self.parallel_prob < 1:
            raise ValueError("probabilities out of range")
        if self.uncertainty not in ("interval", "discrete", "continuous"):
            raise ValueError(f"unknown uncertainty {self.uncertainty!r}")
        if self.family == "random_dag" and self.n < 2:
            raise ValueError("random_dag needs n >= 2")
        if self.family == "layered" and (self.layers < 2 or self.width < 1):
            raise ValueError("layered needs at least 2 layers and width >= 1")
        if self.family == "asp" and self.leaves < 1:
            raise ValueError("asp needs at least one leaf")


def _rng(seed):
    return np.random.Generator(np.random.PCG64(int(seed) & (2**64 - 1)))


def _layered_arcs(p, rng):
    H, w = p.layers, p.width
    layer_nodes = [[0]]
    nxt = 1
    for _ in range(H - 2):
        layer_nodes.append(list(range(nxt, nxt + w)))
        nxt += w
    layer_nodes.append([nxt])
    n = nxt + 1
    arcs = []
    for a, b in zip(layer_nodes, layer_nodes[1:]):
        chosen = set()
        for u in a:
            for v in b:
                if rng.random() < p.density:
                    chosen.add((u, v))
        # every node keeps an arc into the next layer and out of the previous one
        for u in a:
            if not any(x == u for x, _ in chosen):
                chosen.add((u, int(rng.choice(b))))
        for v in b:
            if not any(y == v for _, y in chosen):
                chosen.add((int(rng.choice(a)), v))
        arcs.extend(sorted(chosen))
    return n, 0, n - 1, arcs


def _dag_arcs(p, rng):
    n = p.n
    inner = sorted(int(v) for v in rng.permutation(np.arange(1, n - 1))[: rng.integers(0, n - 1)])
    chain = [0] + inner + [n - 1]
    arcs = list(zip(chain, chain[1:]))
    extra = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p.arc_prob]
    rng.shuffle(extra)
    if p.max_arcs is not None:
        if len(arcs) > p.max_arcs:
            raise GenerationFailed("backbone path alone exceeds max_arcs")
        extra = extra[: p.max_arcs - len(arcs)]
    arcs = sorted(set(arcs) | set(map(tuple, extra)))
    return n, 0, n - 1, arcs


def _asp_arcs(p, rng):
    """Grow an ASP graph by repeatedly splitting a random arc in series or parallel."""
    tails, heads = [0], [1]
    n = 2
    for _ in range(p.leaves - 1):
        e = int(rng.integers(len(tails)))
        if rng.random() < p.series_bias:
            v = n
            n += 1
            tails.append(v)
            heads.append(heads[e])
            heads[e] = v
        else:
            tails.append(tails[e])
            heads.append(heads[e])
    return n, 0, 1, list(zip(tails, heads))


def _add_parallel(arcs, prob, rng, limit=None):
    if prob <= 0:
        return arcs
    out = []
    for a in arcs:
        out.append(a)
        if rng.random() < prob and (limit is None or len(out) < limit):
            out.append(a)
    return out


def _draw(rng, rng_range, size, integral):
    lo, hi = rng_range
    if integral:
        return rng.integers(int(lo), int(hi) + 1, size=size).astype(float)
    return rng.uniform(lo, hi, size=size)


def generate(params):
    """One instance; same params (seed included) always give the same instance."""
    p = params
    rng = _rng(p.seed)
    for _ in range(p.max_tries):
        if p.family == "layered":
            n, s, t, arcs = _layered_arcs(p, rng)
            arcs = _add_parallel(arcs, p.parallel_prob, rng)
        elif p.family == "random_dag":
            n, s, t, arcs = _dag_arcs(p, rng)
            arcs = _add_parallel(arcs, p.parallel_prob, rng, p.max_arcs)
        else:
            n, s, t, arcs = _asp_arcs(p, rng)
        g = Multidigraph.from_arcs(arcs, s, t, n=n)
        m = g.m
        C = _draw(rng, p.C_range, m, p.integral)
        ch = _draw(rng, p.c_hat_range, m, p.integral)
        dv = _draw(rng, p.delta_range, m, p.integral)
        k = int(rng.integers(p.k_range[0], p.k_range[1] + 1))
        if p.neighborhood == "random":
            kind = list(Neighborhood)[int(rng.integers(3))]
        else:
            kind = Neighborhood.parse(p.neighborhood)
        if p.uncertainty == "interval":
            unc = Interval()
        elif p.uncertainty == "discrete":
            unc = DiscreteBudget(min(m, int(rng.integers(p.budget_range[0], p.budget_range[1] + 1))))
        else:
            b = _draw(rng, p.budget_range, 1, p.integral)[0]
            unc = ContinuousBudget(float(b))
        inst = Instance(g, C, ch, dv, k, kind, unc, label=f"{p.family}-{p.seed}")
        if validate_instance(inst):
            continue
        promise = {"layered": is_layered, "asp": is_asp, "random_dag": is_acyclic}[p.family]
        if promise(g):
            return inst
    raise GenerationFailed(f"no valid {p.family} instance after {p.max_tries} tries")


# --------------------------------------------------------------------------
# vertex-disjoint paths and gadgets

@dataclass(frozen=True)
class KVdpInstance:
    """Digraph ``(n, arcs)`` with terminal pairs ``pairs[i] = (s_i, t_i)``."""

    n: int
    arcs: tuple
    pairs: tuple
    names: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple((int(u), int(v)) for u, v in self.arcs))
        object.__setattr__(self, "pairs", tuple((int(a), int(b)) for a, b in self.pairs))
        if not self.pairs:
            raise ValueError("need at least one terminal pair")
        terms = [v for pr in self.pairs for v in pr]
        if len(set(terms)) != len(terms):
            raise ValueError("terminals must be pairwise distinct")
        if any(not 0 <= v < self.n for v in terms):
            raise ValueError("terminal out of range")
        for u, v in self.arcs:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"arc ({u},{v}) references a missing node")

    @property
    def K(self):
        return len(self.pairs)


def disjoint_paths_exist(kv):
    """Exhaustive backtracking: are there pairwise vertex-disjoint s_i-t_i paths?"""
    out = [[] for _ in range(kv.n)]
    for u, v in kv.arcs:
        if v not in out[u]:
            out[u].append(v)
    terms = {v for pr in kv.pairs for v in pr}

    def route(i, used):
        if i == kv.K:
            return True
        s, t = kv.pairs[i]
        blocked = used | (terms - {s, t})
        stack = [(s, iter(out[s]))]
        on = {s}
        while stack:
            u, it = stack[-1]
            for v in it:
                if v in on or v in blocked:
                    continue
                if v == t:
                    if route(i + 1, used | on | {t}):
                        return True
                    continue
                on.add(v)
                stack.append((v, iter(out[v])))
                break
            else:
                stack.pop()
                on.discard(u)
        return False

    return route(0, frozenset())


def _gadget_graph(kv):
    """``G + H``: G's arcs keep ids ``0..|A|-1``; H follows as
    ``(s_1,t_1), (t_1,s_2), (s_2,t_2), ..., (s_K,t_K)``."""
    arcs = list(kv.arcs)
    h_ids, pair_ids = [], []
    for i, (s, t) in enumerate(kv.pairs):
        if i:
            h_ids.append(len(arcs))
            arcs.append((kv.pairs[i - 1][1], s))
        pair_ids.append(len(arcs))
        h_ids.append(len(arcs))
        arcs.append((s, t))
    names = list(kv.names) if kv.names else [f"v{v}" for v in range(kv.n)]
    for i, (s, t) in enumerate(kv.pairs, start=1):
        names[s], names[t] = f"s{i}", f"t{i}"
    g = Multidigraph.from_arcs(arcs, kv.pairs[0][0], kv.pairs[-1][1], n=kv.n, node_names=names)
    return g, tuple(h_ids), set(pair_ids)


def gadget_recsp_incl(kv):
    """Rec SP instance (Incl, ``k = K``) whose optimum is 0 iff the paths exist."""
    g, h, pair_ids = _gadget_graph(kv)
    m0 = len(kv.arcs)
    C = np.zeros(g.m)
    cbar = np.zeros(g.m)
    cbar[:m0] = 1.0
    C[list(pair_ids)] = 1.0
    return Instance(g, C, cbar, np.zeros(g.m), kv.K, Neighborhood.INCL, Interval(),
                    label="gadget-recsp-incl")


def gadget_incsp_excl(kv):
    """Incremental instance (Excl, ``k = K``) plus the fixed first-stage path ``H``."""
    g, h, pair_ids = _gadget_graph(kv)
    cbar = np.zeros(g.m)
    cbar[list(pair_ids)] = 1.0
    inst = Instance(g, np.zeros(g.m), cbar, np.zeros(g.m), kv.K, Neighborhood.EXCL,
                    Interval(), label="gadget-incsp-excl")
    return inst, h


def gadget_recrob_discrete(kv):
    """Discrete-budget instance (Incl, ``k = 1``, budget 1): only G's arcs and
    the ``(s_i, t_i)`` arcs can deviate, by 1."""
    g, h, pair_ids = _gadget_graph(kv)
    m0 = len(kv.arcs)
    dev = np.zeros(g.m)
    dev[:m0] = 1.0
    dev[list(pair_ids)] = 1.0
    return Instance(g, np.zeros(g.m), np.zeros(g.m), dev, 1, Neighborhood.INCL,
                    DiscreteBudget(1), label="gadget-recrob-discrete")


def random_kvdp(seed, n=8, K=2, arc_prob=0.2, max_arcs=None):
    """Random digraph (cycles allowed, no loops) with ``K`` random terminal pairs."""
    if 2 * K > n:
        raise ValueError("need at least 2K nodes")
    rng = _rng(seed)
    arcs = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < arc_prob]
    if max_arcs is not None and len(arcs) > max_arcs:
        keep = sorted(rng.choice(len(arcs), size=max_arcs, replace=False).tolist())
        arcs = [arcs[i] for i in keep]
    terms = rng.permutation(n)[: 2 * K].tolist()
    pairs = [(terms[2 * i], terms[2 * i + 1]) for i in range(K)]
    return KVdpInstance(n, tuple(arcs), tuple(pairs))

from __future__ import annotations

import pytest

from rrsp import io
from rrsp.gen import (
    GenerationFailed,
    GenParams,
    KVdpInstance,
    disjoint_paths_exist,
    gadget_incsp_excl,
    gadget_recrob_discrete,
    gadget_recsp_incl,
    generate,
    random_kvdp,
)
from rrsp.graph import asp_decompose, classify, is_acyclic, is_asp, is_layered
from rrsp.model import DiscreteBudget, Interval, Neighborhood, validate_instance
from rrsp.oracle import oracle_incremental, oracle_recrob, oracle_recsp


def _gadget_optima(kv):
    a = oracle_recsp(gadget_recsp_incl(kv)).value
    inst, h = gadget_incsp_excl(kv)
    b = oracle_incremental(inst, h, inst.upper)[1]
    c = oracle_recrob(gadget_recrob_discrete(kv)).value
    return a, b, c


# ---------------------------------------------------------------- generate

def test_layered_small_diamond():
    inst = generate(GenParams(family="layered", layers=3, width=2, density=1.0, seed=1))
    assert is_layered(inst.graph)
    assert inst.graph.n == 4 and inst.m == 4
    # the full diamond is also series-parallel, which takes precedence
    assert classify(inst.graph).kind == "asp"


def test_asp_family_decomposes():
    inst = generate(GenParams(family="asp", leaves=4, seed=7))
    tree = asp_decompose(inst.graph)
    assert tree.num_leaves == inst.m == 4


def test_generate_is_deterministic():
    for family in ("layered", "random_dag", "asp"):
        p = GenParams(family=family, seed=123, neighborhood="random", uncertainty="continuous")
        assert io.dumps(generate(p)) == io.dumps(generate(p))
    a = io.dumps(generate(GenParams(seed=1)))
    b = io.dumps(generate(GenParams(seed=2)))
    assert a != b


def test_family_promises_hold():
    for seed in range(30):
        for family, check in (("layered", is_layered), ("asp", is_asp), ("random_dag", is_acyclic)):
            inst = generate(GenParams(family=family, seed=seed, uncertainty="discrete",
                                      parallel_prob=0.2 if family != "asp" else 0.0))
            assert check(inst.graph)
            assert validate_instance(inst) == []
            assert isinstance(inst.uncertainty, DiscreteBudget)


def test_random_dag_respects_max_arcs():
    for seed in range(20):
        inst = generate(GenParams(family="random_dag", n=12, arc_prob=0.9, max_arcs=20, seed=seed))
        assert inst.m <= 20


def test_params_validation():
    with pytest.raises(ValueError):
        GenParams(family="grid")
    with pytest.raises(ValueError):
        GenParams(C_range=(5, 1))
    with pytest.raises(ValueError):
        GenParams(density=0.0)
    with pytest.raises(ValueError):
        GenParams(uncertainty="ellipsoid")


def test_generation_failure_is_reported():
    # no arcs can appear past the first layer at this density with one try
    with pytest.raises(GenerationFailed):
        generate(GenParams(family="random_dag", n=40, arc_prob=0.001, max_tries=1, seed=0,
                           c_hat_range=(0, 0), delta_range=(0, 0), k_range=(0, 0),
                           max_arcs=1))


# ---------------------------------------------------------------- K-V-DP

def test_kvdp_validation():
    with pytest.raises(ValueError):
        KVdpInstance(4, [(0, 1)], [])
    with pytest.raises(ValueError):
        KVdpInstance(4, [(0, 1)], [(0, 1), (1, 2)])
    with pytest.raises(ValueError):
        KVdpInstance(2, [(0, 5)], [(0, 1)])


def test_disjoint_paths_search():
    kv = KVdpInstance(4, [(0, 1), (2, 3)], [(0, 1), (2, 3)])
    assert disjoint_paths_exist(kv)
    # both routes need node 4
    kv = KVdpInstance(5, [(0, 4), (4, 1), (2, 4), (4, 3)], [(0, 1), (2, 3)])
    assert not disjoint_paths_exist(kv)
    # a path may not pass through another pair's terminal
    kv = KVdpInstance(4, [(0, 2), (2, 1), (2, 3)], [(0, 1), (2, 3)])
    assert not disjoint_paths_exist(kv)


def test_gadget_h_has_2k_minus_1_arcs():
    for K in (1, 2, 3):
        kv = random_kvdp(K, n=8, K=K)
        inst, h = gadget_incsp_excl(kv)
        assert len(h) == 2 * K - 1
        assert inst.graph.is_path(h)
        assert [inst.graph.arc(e) for e in h[::2]] == list(kv.pairs)


def test_gadget_costs_and_parameters():
    kv = KVdpInstance(4, [(0, 1), (2, 3)], [(0, 1), (2, 3)])
    inc = gadget_recsp_incl(kv)
    assert inc.k == 2 and inc.neighborhood is Neighborhood.INCL and isinstance(inc.uncertainty, Interval)
    assert inc.first.tolist() == [0, 0, 1, 0, 1]
    assert inc.upper.tolist() == [1, 1, 0, 0, 0]
    exc, h = gadget_incsp_excl(kv)
    assert exc.neighborhood is Neighborhood.EXCL and h == (2, 3, 4)
    assert exc.upper.tolist() == [0, 0, 1, 0, 1]
    dis = gadget_recrob_discrete(kv)
    assert dis.k == 1 and dis.uncertainty == DiscreteBudget(1)
    assert dis.deviation.tolist() == [1, 1, 1, 0, 1]
    assert dis.first.tolist() == dis.nominal.tolist() == [0] * 5
    assert dis.graph.name(0) == "s1" and dis.graph.name(3) == "t2"


def test_k1_with_direct_arc_is_positive():
    kv = KVdpInstance(2, [(0, 1)], [(0, 1)])
    assert disjoint_paths_exist(kv)
    assert _gadget_optima(kv) == (0, 0, 0)


def test_k1_without_path_is_negative():
    kv = KVdpInstance(3, [(1, 2), (2, 0)], [(0, 1)])
    assert not disjoint_paths_exist(kv)
    a, b, c = _gadget_optima(kv)
    assert a > 0 and b > 0 and c > 0


def test_k2_grid_with_disjoint_paths():
    # 3x3 grid, arcs right and down; s1=(0,0)->t1=(0,2), s2=(1,0)->t2=(2,2)
    idx = {(r, c): 3 * r + c for r in range(3) for c in range(3)}
    arcs = []
    for (r, c), v in idx.items():
        if c < 2:
            arcs.append((v, idx[r, c + 1]))
        if r < 2:
            arcs.append((v, idx[r + 1, c]))
    kv = KVdpInstance(9, arcs, [(idx[0, 0], idx[0, 2]), (idx[1, 0], idx[2, 2])])
    assert disjoint_paths_exist(kv)
    assert _gadget_optima(kv) == (0, 0, 0)


def test_positive_instances_always_give_zero():
    for seed in range(120):
        K = 1 + seed % 3
        kv = random_kvdp(seed, n=6 + seed % 7, K=K, arc_prob=0.22)
        if disjoint_paths_exist(kv):
            assert _gadget_optima(kv) == (0, 0, 0)


def test_reverse_direction_fails_for_three_pairs():
    # s1=0 t1=1 s2=2 t2=3 s3=4 t3=5; G routes s1->t2, s3->t1, s2->t3
    kv = KVdpInstance(6, [(0, 3), (4, 1), (2, 5)], [(0, 1), (2, 3), (4, 5)])
    assert not disjoint_paths_exist(kv)
    inc = oracle_recsp(gadget_recsp_incl(kv))
    assert inc.value == 0
    # X visits the terminal pairs out of order: s1 t2 s3 t1 s2 t3
    assert inc.first_stage == (0, 6, 1, 4, 2)
    inst, h = gadget_incsp_excl(kv)
    assert oracle_incremental(inst, h, inst.upper)[1] == 0


def test_reverse_direction_fails_for_discrete_gadget_with_shortcut():
    # s1=0 t1=1 s2=2 t2=3 a=4; G has s1->a->t2 and the shortcut s1->t2
    kv = KVdpInstance(5, [(0, 4), (4, 3), (0, 3)], [(0, 1), (2, 3)])
    assert not disjoint_paths_exist(kv)
    sol = oracle_recrob(gadget_recrob_discrete(kv))
    assert sol.value == 0

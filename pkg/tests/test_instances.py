import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rppsieve.generate import GenConfig, random_ee, random_rpp
from rppsieve.instances import (
    Arc,
    CbmInstance,
    EeInstance,
    RppInstance,
    analyze_components,
    components,
    drop_isolated,
    ee_to_rpp,
    is_connected,
    is_metric,
    metric_close,
    no_cycles_transform,
    normalize,
    normalize_balances,
    rpp_to_ee,
    shortest_paths,
)


def ee(kind, n, required, budget, w=None):
    if w is None:
        w = np.ones((n, n), dtype=np.int64)
    return EeInstance(kind, n, tuple(required), w, budget)


def test_rpp_instance_validation():
    with pytest.raises(ValueError):
        RppInstance("directed", 2, (Arc(0, 2, 1, True),), 0)
    with pytest.raises(ValueError):
        RppInstance("directed", 2, (Arc(0, 1, -1, True),), 0)
    with pytest.raises(ValueError):
        RppInstance("mixed", 2, (), 0)
    with pytest.raises(ValueError):
        RppInstance("directed", 2, (), -1)


def test_rpp_connectivity():
    one_way = RppInstance("directed", 2, (Arc(0, 1, 1, True),), 3)
    with pytest.raises(ValueError):
        one_way.validate()
    RppInstance("undirected", 2, (Arc(0, 1, 1, True),), 3).validate()
    cycle = RppInstance("directed", 2, (Arc(0, 1, 1, True), Arc(1, 0, 2, False)), 3)
    cycle.validate()
    assert cycle.required_weight == 1
    assert cycle.required == [Arc(0, 1, 1, True)]


def test_is_connected():
    assert is_connected(3, [(0, 1), (1, 2), (2, 0)], directed=True)
    assert not is_connected(3, [(0, 1), (1, 2)], directed=True)
    assert is_connected(3, [(0, 1), (1, 2)], directed=False)
    assert not is_connected(3, [(0, 1)], directed=False)
    assert is_connected(1, [], directed=True)


def test_ee_instance_checks():
    w = np.array([[0, 1], [2, 0]])
    with pytest.raises(ValueError):
        ee("undirected", 2, [(0, 1)], 1, w)
    with pytest.raises(ValueError):
        ee("directed", 2, [(0, 5)], 1)
    with pytest.raises(ValueError):
        ee("directed", 2, [(0, 1)], 1, -np.ones((2, 2)))
    inst = ee("directed", 3, [(0, 1), (0, 2), (0, 1)], 1)
    assert inst.weight.flags.writeable is False
    assert list(inst.balance()) == [-3, 2, 1]
    assert list(inst.parity()) == [1, 0, 1]
    assert inst.isolated() == []
    assert ee("directed", 3, [(0, 1)], 1).isolated() == [2]


def test_components_labels_by_smallest_vertex():
    comp = components(5, [(4, 3), (1, 2)])
    assert list(comp) == [0, 1, 1, 2, 2]


def test_shortest_paths_and_metric():
    w = np.array([[0, 1, 5], [9, 0, 1], [9, 9, 0]])
    assert not is_metric(w)
    d = shortest_paths(w)
    assert d[0, 2] == 2
    assert is_metric(d)
    assert shortest_paths(w, cap=3)[1, 0] == 3


def test_metric_close_two_hop():
    w = np.full((3, 3), 5)
    w[0, 1] = w[1, 0] = w[1, 2] = w[2, 1] = 1
    out = metric_close(ee("undirected", 3, [(0, 1)], 10, w))
    assert out.weight[0, 2] == 2
    assert is_metric(out.weight)
    # capped at budget + 1
    assert metric_close(ee("undirected", 3, [(0, 1)], 0, w)).weight.max() == 1


def test_normalize_balances_splits_vertices():
    inst = ee("directed", 3, [(0, 1), (0, 1), (0, 2)], 4)
    out = normalize_balances(inst)
    assert set(np.abs(out.balance())) <= {0, 1}
    assert out.n == 3 + 2 + 1  # vertex 0 has balance -3, vertex 1 has +2
    assert out.labels[3:] == (0, 0, 1)
    # copies sit at distance 0 from their origin
    assert out.weight[0, 3] == 0 and out.weight[4, 0] == 0
    with pytest.raises(ValueError):
        normalize_balances(ee("undirected", 2, [(0, 1)], 1))


def test_no_cycles_transform_directed():
    inst = ee("directed", 2, [(0, 1)], 2, np.array([[0, 1], [2, 0]]))
    out = no_cycles_transform(inst)
    assert out.n == 6
    bal = out.balance()
    assert list(bal[:2]) == list(inst.balance())
    assert list(bal[2:4]) == [-1, -1] and list(bal[4:]) == [1, 1]
    assert out.weight[4, 2] == 0 and out.weight[0, 2] == 0
    assert out.weight[2, 3] == 1 and out.weight[3, 2] == 2
    assert analyze_components(out).k == 1


def test_no_cycles_transform_undirected():
    inst = ee("undirected", 3, [(0, 1), (1, 2)], 2)
    out = no_cycles_transform(inst)
    deg = np.add(*out.degrees())
    assert list(deg[:3]) == [3, 4, 3]
    assert list(deg[3:]) == [1] * 6
    assert analyze_components(out).k == 1


def test_analyze_components_checks():
    norm = analyze_components(metric_close(ee("directed", 4, [(0, 1), (2, 3)], 3)))
    assert norm.k == 2
    assert norm.U == (1, 3) and norm.W == (0, 2)
    assert norm.m == 2
    with pytest.raises(ValueError):
        analyze_components(ee("directed", 2, [(0, 1), (0, 1)], 1))
    bad = np.array([[0, 1, 9], [1, 0, 1], [9, 1, 0]])
    with pytest.raises(ValueError):
        analyze_components(ee("undirected", 3, [(0, 1), (0, 1)], 20, bad))


def test_single_cycle_normalizes_to_companions_only():
    norm = normalize(ee("directed", 3, [(0, 1), (1, 2), (2, 0)], 2))
    assert norm.k == 1
    assert sorted(norm.origin[v] for v in norm.U) == [0, 1, 2]
    assert all(norm.origin[v] == v % 3 for v in range(norm.n))


def test_drop_isolated_keeps_labels():
    out = drop_isolated(ee("directed", 4, [(1, 3)], 1))
    assert out.n == 2 and out.labels == (1, 3) and out.required == ((0, 1),)


def test_rpp_to_ee_weights_are_capped_paths():
    arcs = (Arc(0, 1, 2, True), Arc(1, 2, 1, False), Arc(2, 0, 1, False), Arc(3, 0, 1, False), Arc(0, 3, 1, False))
    inst = RppInstance("directed", 4, arcs, 5)
    out = rpp_to_ee(inst)
    assert out.n == 2 and out.labels == (0, 1)
    assert out.weight[1, 0] == 2 and out.weight[0, 1] == 2
    tight = rpp_to_ee(RppInstance("directed", 4, arcs, 1))
    assert tight.weight[1, 0] == 2  # capped at budget + 1


def test_ee_to_rpp_round_trip_weights():
    w = np.array([[0, 1, 7], [1, 0, 2], [7, 2, 0]])
    inst = ee("undirected", 3, [(0, 1)], 4, w)
    rpp = ee_to_rpp(inst)
    assert [a for a in rpp.arcs if a.required] == [Arc(0, 1, 1, True)]
    assert {(a.tail, a.head) for a in rpp.arcs if not a.required} == {(0, 1), (1, 2)}


def test_cbm_instance_checks():
    with pytest.raises(ValueError):
        CbmInstance("bipartite", 2, (0, 0), ((0, 1, 1),), (), 0, (0, 0))
    with pytest.raises(ValueError):
        CbmInstance("general", 2, (0, 0), ((0, 0, 1),), (), 0)
    with pytest.raises(ValueError):
        CbmInstance("general", 2, (0, 1), (), ((0, 1), (1, 0)), 0)
    inst = CbmInstance("general", 3, (0, 1, 1), ((0, 1, 3), (1, 0, 2), (1, 2, 1)), ((1, 0),), 2)
    assert inst.requests == ((0, 1),)
    assert inst.edge_weights() == {(0, 1): 2, (1, 2): 1}
    assert inst.request_index(1, 0) == 0
    assert inst.request_index(1, 2) == -1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_normalize_invariants(seed, directed):
    inst = random_ee(GenConfig(n=6, k=2, max_weight=4, budget=5), seed, directed)
    norm = normalize(inst)
    assert is_metric(norm.weight)
    assert norm.weight.max() <= norm.cap
    assert norm.k == len(set(components(inst.n, inst.required)[v] for v in range(inst.n) if v not in inst.isolated()))
    if directed:
        assert len(norm.U) == len(norm.W) >= norm.k
    else:
        assert all(len(part) % 2 == 0 and part for part in norm.odd_parts())
    assert len(norm.origin) == norm.n
    for u in range(norm.n):
        for v in range(norm.n):
            ou, ov = norm.origin[u], norm.origin[v]
            if ou == ov:
                assert norm.weight[u, v] == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_generated_rpp_has_k_pieces(seed, k):
    inst = random_rpp(GenConfig(n=7, k=k, required_vertices=5), seed)
    inst.validate()
    req = [(a.tail, a.head) for a in inst.required]
    touched = sorted({v for a in req for v in a})
    comp = components(inst.n, req)
    assert len({int(comp[v]) for v in touched}) == k

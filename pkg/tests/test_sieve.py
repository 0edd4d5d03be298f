import itertools
from pathlib import Path

import numpy as np
import pytest

from rppsieve.field import GF2m, make_rng
from rppsieve.generate import MatchingGenConfig, random_cbm, random_normalized
from rppsieve.instances import CbmInstance
from rppsieve.io import load
from rppsieve.linalg import determinant, interpolate
from rppsieve.oracle import brute_force_ee, cap_optimum, symbolic_Q
from rppsieve.sieve import (
    PEvaluator,
    QEvaluator,
    StageTimer,
    draw_matching_variables,
    eval_p_cbm,
    eval_p_cgm,
    eval_Q_directed,
    eval_Q_undirected,
    matching_matrix,
    subset_index_lists,
)
from rppsieve.tables import build_zeta_tables, compute_path_table, draw_edge_variables

FIXTURES = Path(__file__).parent / "fixtures"


def q_at(inst, x, z, field):
    table = compute_path_table(inst)
    zt = build_zeta_tables(table, x, z, field)
    fn = eval_Q_directed if inst.kind == "directed" else eval_Q_undirected
    return fn(zt, inst, field)


def test_subset_index_lists():
    comp = np.array([0, 1, 1, 2])
    ptr, idx = subset_index_lists([0, 2, 3], comp, 3)
    rows = [list(idx[ptr[I] : ptr[I + 1]]) for I in range(8)]
    assert rows == [[], [0], [1], [0, 1], [2], [0, 2], [1, 2], [0, 1, 2]]


@pytest.mark.parametrize("directed", [True, False])
@pytest.mark.parametrize("seed", range(10))
def test_Q_equals_symbolic_survivors(directed, seed):
    field = GF2m(16)
    inst = random_normalized(seed, directed, k=1 + seed % 3, m=1 + seed % 3, extra=seed % 2)
    table = compute_path_table(inst)
    x = draw_edge_variables(table, field, make_rng(seed), not directed)
    sym = symbolic_Q(inst)
    for z in (0, 1, 77):
        expect = sym.evaluate(field, lambda a, I, b: int(x[a, b, I]), z)
        assert q_at(inst, x, z, field) == expect


@pytest.mark.parametrize("directed", [True, False])
def test_lowest_surviving_degree_is_the_optimum(directed):
    field = GF2m(64)
    for seed in range(15):
        inst = random_normalized(seed, directed, k=2, m=2, extra=1, budget=6)
        table = compute_path_table(inst)
        x = draw_edge_variables(table, field, make_rng(seed), not directed)
        L = inst.m * inst.cap
        vals = QEvaluator(inst, table, x, field).values(range(L + 1))
        coeffs = interpolate(field, list(zip(range(L + 1), vals)), L)
        low = next((i for i, c in enumerate(coeffs[: inst.budget + 1]) if c), None)
        assert low == cap_optimum(brute_force_ee(inst), inst.budget)


def test_sieve_rejects_wrong_kind():
    field = GF2m(16)
    inst = random_normalized(0, True, k=2, m=2)
    table = compute_path_table(inst)
    x = draw_edge_variables(table, field, make_rng(0), False)
    zt = build_zeta_tables(table, x, 3, field)
    with pytest.raises(ValueError):
        eval_Q_undirected(zt, inst, field)
    und = random_normalized(0, False, k=2, m=2)
    with pytest.raises(ValueError):
        eval_Q_directed(zt, und, field)


def test_undirected_needs_symmetric_tables():
    field = GF2m(16)
    inst = random_normalized(1, False, k=1, m=2)
    table = compute_path_table(inst)
    x = draw_edge_variables(table, field, make_rng(0), False)
    if np.array_equal(x, np.transpose(x, (1, 0, 2))):
        pytest.skip("draw happened to be symmetric")
    with pytest.raises(ValueError):
        q_at(inst, x, 2, field)


def test_threads_do_not_change_values():
    field = GF2m(64)
    inst = random_normalized(4, True, k=3, m=3, extra=2, budget=5)
    table = compute_path_table(inst)
    x = draw_edge_variables(table, field, make_rng(1), False)
    ev = QEvaluator(inst, table, x, field)
    timer = StageTimer()
    one = ev.values(range(12), threads=1, timer=timer)
    four = ev.values(range(12), threads=4)
    assert one == four
    assert set(timer.seconds) == {"zeta", "sieve"}
    assert one == [q_at(inst, x, z, field) for z in range(12)]


def matchings_poly(inst, x, y, z, field):
    """p at z by enumerating perfect matchings that meet all requests."""
    mm = matching_matrix(inst)
    total = 0
    if inst.kind == "bipartite":
        rows = range(len(mm.rows))
        options = [list(zip(rows, perm)) for perm in itertools.permutations(range(len(mm.cols)))]
    else:
        from rppsieve.oracle import _pair_partitions

        options = _pair_partitions(list(range(inst.n)))
    for pairs in options:
        if not all(mm.present[a, b] for a, b in pairs):
            continue
        met = {int(mm.request[a, b]) for a, b in pairs}
        if not all(q in met for q in range(mm.nreq)):
            continue
        term = field.pow(z, sum(int(mm.exponent[a, b]) for a, b in pairs))
        for a, b in pairs:
            term = field.mul(term, int(x[a, b]))
            q = int(mm.request[a, b])
            if q >= 0:
                term = field.mul(term, int(y[q]))
        total ^= term
    return total


@pytest.mark.parametrize("bipartite", [True, False])
@pytest.mark.parametrize("seed", range(12))
def test_matching_polynomial_matches_enumeration(bipartite, seed):
    field = GF2m(32)
    cfg = MatchingGenConfig(side=1 + seed % 4, classes=3, requests=seed % 3, budget=6)
    inst = random_cbm(cfg, seed, bipartite)
    mm = matching_matrix(inst)
    x, y = draw_matching_variables(mm, field, make_rng(seed))
    fn = eval_p_cbm if bipartite else eval_p_cgm
    for z in (0, 1, 9):
        assert fn(inst, x, y, z, field) == matchings_poly(inst, x, y, z, field)


def test_crossing_instance_polynomial():
    field = GF2m(16)
    inst = load(FIXTURES / "crossing.cbm")
    mm = matching_matrix(inst)
    x, y = draw_matching_variables(mm, field, make_rng(0))
    # only the crossing matching {1-4, 3-2} meets the request; it weighs 2
    L = 2 * int(mm.exponent.max())
    vals = PEvaluator(mm, x, y, field).values(range(L + 1))
    coeffs = interpolate(field, list(zip(range(L + 1), vals)), L)
    assert [i for i, c in enumerate(coeffs) if c] == [2]


def test_cgm_pfaffian_squares_to_determinant():
    field = GF2m(16)
    inst = random_cbm(MatchingGenConfig(side=3, requests=0), 3, bipartite=False)
    mm = matching_matrix(inst)
    x, y = draw_matching_variables(mm, field, make_rng(2))
    z = 5
    pf = eval_p_cgm(inst, x, y, z, field)
    m = np.zeros_like(x)
    for a in range(x.shape[0]):
        for b in range(x.shape[1]):
            if mm.present[a, b]:
                m[a, b] = field.mul(int(x[a, b]), field.pow(z, int(mm.exponent[a, b])))
    assert field.mul(pf, pf) == determinant(field, m)


def test_odd_or_unbalanced_matching_instances():
    field = GF2m(16)
    odd = CbmInstance("general", 3, (0, 0, 1), ((0, 1, 1),), (), 1)
    mm = matching_matrix(odd)
    x, y = draw_matching_variables(mm, field, make_rng(0))
    assert eval_p_cgm(odd, x, y, 1, field) == 0
    lopsided = CbmInstance("bipartite", 3, (0, 0, 0), ((0, 2, 1),), (), 1, (0, 0, 1))
    mm = matching_matrix(lopsided)
    x, y = draw_matching_variables(mm, field, make_rng(0))
    assert eval_p_cbm(lopsided, x, y, 1, field) == 0
    with pytest.raises(ValueError):
        eval_p_cgm(lopsided, x, y, 1, field)

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rppsieve.field import GF2m, make_rng
from rppsieve.generate import random_normalized
from rppsieve.oracle import brute_force_paths
from rppsieve.tables import build_zeta_tables, compute_path_table, draw_edge_variables, fast_zeta


def naive_zeta(f):
    f = np.asarray(f, dtype=np.uint64)
    out = np.zeros_like(f)
    for S in range(f.shape[-1]):
        for A in range(f.shape[-1]):
            if A & S == A:
                out[..., S] ^= f[..., A]
    return out


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 8), st.integers(0, 2**32))
def test_fast_zeta_matches_naive(k, seed):
    f = make_rng(seed).integers(0, 2**63, size=(2, 1 << k), dtype=np.uint64)
    assert np.array_equal(fast_zeta(f), naive_zeta(f))


def test_fast_zeta_is_an_involution_in_char_two():
    f = make_rng(0).integers(0, 2**63, size=64, dtype=np.uint64)
    assert np.array_equal(fast_zeta(fast_zeta(f)), f)


def test_fast_zeta_rejects_bad_length():
    with pytest.raises(ValueError):
        fast_zeta(np.zeros(6, dtype=np.uint64))


@pytest.mark.parametrize("directed", [True, False])
@pytest.mark.parametrize("seed", range(8))
def test_path_table_matches_enumeration(directed, seed):
    inst = random_normalized(seed, directed, k=1 + seed % 4, m=2 + seed % 2, extra=seed % 3, budget=8)
    table = compute_path_table(inst)
    assert table.values.max(initial=0) <= inst.cap
    for a, u in enumerate(table.sources):
        for b, w in enumerate(table.targets):
            P = int(table.pmask[a, b])
            if P < 0:
                with pytest.raises(KeyError):
                    table.get(u, (1 << inst.k) - 1, w)
                continue
            for I in range(1 << inst.k):
                if I & P == P:
                    assert table.get(u, I, w) == brute_force_paths(inst, u, I, w)


@pytest.mark.parametrize("symmetric", [False, True])
def test_edge_variables_support(symmetric):
    inst = random_normalized(5, not symmetric, k=3, m=3, extra=1)
    table = compute_path_table(inst)
    x = draw_edge_variables(table, GF2m(64), make_rng(1), symmetric)
    for a in range(x.shape[0]):
        for b in range(x.shape[1]):
            P = int(table.pmask[a, b])
            for I in range(x.shape[2]):
                on = P >= 0 and I & P == P
                assert (x[a, b, I] != 0) == on  # zero elsewhere, nonzero w.h.p. on edges
    if symmetric:
        assert np.array_equal(x, np.transpose(x, (1, 0, 2)))


@pytest.mark.parametrize("r", [16, 64])
def test_zeta_tables_match_definition(r):
    f = GF2m(r)
    inst = random_normalized(2, True, k=3, m=2, extra=1, budget=5)
    table = compute_path_table(inst)
    x = draw_edge_variables(table, f, make_rng(0), False)
    z = 7
    zt = build_zeta_tables(table, x, z, f)
    assert zt.z == z
    for a in range(x.shape[0]):
        for b in range(x.shape[1]):
            for I in range(x.shape[2]):
                expect = 0
                for J in range(x.shape[2]):
                    if J & I == J and x[a, b, J]:
                        expect ^= f.mul(int(x[a, b, J]), f.pow(z, int(table.values[a, b, J])))
                assert int(zt.entries[a, b, I]) == expect

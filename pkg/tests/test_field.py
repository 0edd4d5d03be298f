import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rppsieve import _kernels as K
from rppsieve.field import GF2m, clmul, default_field, is_irreducible, make_rng, polymod

# GF(8) = GF(2)[x]/(x^3 + x + 1), elements written as bit patterns
GF8_TABLE = [
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 2, 3, 4, 5, 6, 7],
    [0, 2, 4, 6, 3, 1, 7, 5],
    [0, 3, 6, 5, 7, 4, 1, 2],
    [0, 4, 3, 7, 6, 2, 5, 1],
    [0, 5, 1, 4, 2, 7, 3, 6],
    [0, 6, 7, 1, 5, 3, 2, 4],
    [0, 7, 5, 2, 1, 6, 4, 3],
]

FIELDS = [GF2m(3), GF2m(8), GF2m(16), GF2m(32), GF2m(64), GF2m(32, use_clmul=False), GF2m(64, use_clmul=False)]


def field_id(f):
    return f"r{f.r}" + ("" if f.use_clmul else "-tab8")


def test_gf8_multiplication_table():
    f = GF2m(3)
    assert [[f.mul(a, b) for b in range(8)] for a in range(8)] == GF8_TABLE


def test_gf8_inverse_of_x():
    # x * (x^2 + 1) = x^3 + x = 1 mod x^3 + x + 1
    assert GF2m(3).inv(0b010) == 0b101


def test_gf4_square_roots():
    f = GF2m(2)
    for a in range(4):
        assert f.mul(f.sqrt(a), f.sqrt(a)) == a


def test_modulus_checks():
    with pytest.raises(ValueError):
        GF2m(8, modulus=0x100)  # x^8 is reducible
    with pytest.raises(ValueError):
        GF2m(8, modulus=0x1B)  # wrong degree
    with pytest.raises(ValueError):
        default_field(12)
    assert is_irreducible(0x11B)
    assert not is_irreducible(0b101)  # x^2 + 1 = (x + 1)^2


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        GF2m(8).inv(0)


def test_clmul_small():
    assert clmul(0b11, 0b11) == 0b101
    assert polymod(clmul(0b10, 0b100), 0b1011) == 0b011


@pytest.mark.parametrize("f", FIELDS, ids=field_id)
def test_kernels_agree_with_reference(f):
    fp = f.kernel_params
    rng = make_rng(7)
    for _ in range(300):
        a, b = f.sample(rng), f.sample(rng)
        ref = f._slow_mul(a, b)
        assert f.mul(a, b) == ref
        assert int(K.gf_mul(np.uint64(a), np.uint64(b), fp)) == ref
        assert int(K.gf_sqr(np.uint64(a), fp)) == f._slow_mul(a, a)
        if a:
            inv = int(K.gf_inv(np.uint64(a), fp))
            assert inv == f.inv(a)
            assert f._slow_mul(inv, a) == 1
        s = int(K.gf_sqrt(np.uint64(a), fp))
        assert f._slow_mul(s, s) == a


@pytest.mark.parametrize("f", FIELDS, ids=field_id)
def test_vector_kernels(f):
    fp = f.kernel_params
    rng = make_rng(3)
    a = f.sample_array(rng, 50)
    b = f.sample_array(rng, 50)
    out = np.empty_like(a)
    K.vec_mul(a, b, out, fp)
    assert [int(v) for v in out] == [f._slow_mul(int(x), int(y)) for x, y in zip(a, b)]
    z = f.sample(rng)
    pw = K.power_table(np.uint64(z), 6, fp)
    assert [int(v) for v in pw] == [f.pow(z, i) if f.r <= 16 else f._slow_pow(z, i) for i in range(7)]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(0, 2**64 - 1), st.integers(0, 2**64 - 1))
def test_field_axioms_r64(a, b, c):
    f = default_field(64)
    mul = f.mul
    assert mul(a, b) == mul(b, a)
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, b ^ c) == mul(a, b) ^ mul(a, c)
    assert mul(a, 1) == a
    if a:
        assert mul(a, f.inv(a)) == 1


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 255), st.integers(0, 300))
def test_pow_matches_repeated_product(a, e):
    f = GF2m(8)
    acc = 1
    for _ in range(e % 20):
        acc = f.mul(acc, a)
    assert f.pow(a, e % 20) == acc
    # the multiplicative group has order 255
    assert f.pow(a, 255) == 1
    assert f.pow(a, -1) == f.inv(a)


def test_sampling_is_uniform_r8():
    f = GF2m(8)
    rng = make_rng(2024)
    draws = f.sample_array(rng, 256 * 200)
    counts = np.bincount(draws.astype(np.int64), minlength=256)
    expected = len(draws) / 256
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    # 255 degrees of freedom; the 99.9% quantile is about 330
    assert chi2 < 330


def test_sampling_is_deterministic():
    f = default_field(64)
    a = f.sample_array(make_rng(5), 10)
    b = f.sample_array(make_rng(5), 10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, f.sample_array(make_rng(6), 10))


def test_fields_compare_by_parameters():
    assert GF2m(64) == GF2m(64, use_clmul=False)
    assert GF2m(8) != GF2m(16)

"""Arithmetic in GF(2^r).

Elements are plain Python ints holding an r-bit pattern; bit i is the
coefficient of x^i. Addition is xor. Multiplication is carryless with
reduction by the field's modulus.

The compiled kernels in :mod:`rppsieve._kernels` work on ``numpy.uint64``
arrays and take the tuple returned by :attr:`GF2m.kernel_params`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

FieldElement = int

# Low-weight irreducible moduli, as full (r+1)-bit patterns.
DEFAULT_MODULI: dict[int, int] = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    8: 0x11B,
    16: 0x1002B,
    32: (1 << 32) | 0x8D,
    64: (1 << 64) | 0x1B,
}

SUPPORTED_BITS = (8, 16, 32, 64)

# Fields this small or smaller get log/antilog tables.
TABLE_BITS = 16


def clmul(a: int, b: int) -> int:
    """Carryless product of two GF(2)[x] polynomials."""
    res = 0
    while b:
        if b & 1:
            res ^= a
        a <<= 1
        b >>= 1
    return res


def polymod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def polygcd(a: int, b: int) -> int:
    while b:
        a, b = b, polymod(a, b)
    return a


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(poly: int) -> bool:
    """Rabin's test for a polynomial over GF(2) given as a bit pattern."""
    n = poly.bit_length() - 1
    if n < 1:
        return False
    if n == 1:
        return True

    def x_pow_2k(k: int) -> int:
        v = 0b10
        for _ in range(k):
            v = polymod(clmul(v, v), poly)
        return v

    if x_pow_2k(n) != 0b10:
        return False
    for p in _prime_factors(n):
        if polygcd(poly, x_pow_2k(n // p) ^ 0b10) != 1:
            return False
    return True


@dataclass(frozen=True)
class GF2m:
    """The field GF(2^r) defined by an irreducible ``modulus`` of degree r."""

    r: int = 64
    modulus: int = field(default=0)
    # allow the hardware carryless multiply when present (tests turn it off
    # to exercise the portable table path)
    use_clmul: bool = field(default=True, compare=False)

    def __post_init__(self):
        if not 1 <= self.r <= 64:
            raise ValueError(f"extension degree must be in 1..64, got {self.r}")
        if self.modulus == 0:
            if self.r not in DEFAULT_MODULI:
                raise ValueError(f"no default modulus for r={self.r}; pass one")
            object.__setattr__(self, "modulus", DEFAULT_MODULI[self.r])
        if self.modulus.bit_length() - 1 != self.r:
            raise ValueError(f"modulus {self.modulus:#x} does not have degree {self.r}")
        if not is_irreducible(self.modulus):
            raise ValueError(f"modulus {self.modulus:#x} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.r

    @property
    def mask(self) -> int:
        return (1 << self.r) - 1

    # -- tables -----------------------------------------------------------

    @cached_property
    def _tables(self):
        """(log, exp) tables for small fields, else None."""
        if self.r > TABLE_BITS:
            return None
        n = self.order - 1
        gen = self._find_generator()
        exp = np.zeros(2 * n + 1, dtype=np.uint64)
        log = np.zeros(self.order, dtype=np.int64)
        v = 1
        for i in range(n):
            exp[i] = v
            log[v] = i
            v = self._slow_mul(v, gen)
        exp[n : 2 * n] = exp[:n]
        exp[2 * n] = exp[0]
        return log, exp

    def _find_generator(self) -> int:
        n = self.order - 1
        if n == 1:
            return 1
        factors = _prime_factors(n)
        for g in range(2, self.order):
            if all(self._slow_pow(g, n // p) != 1 for p in factors):
                return g
        raise AssertionError("multiplicative group has no generator")

    def _slow_mul(self, a: int, b: int) -> int:
        res = 0
        top = 1 << self.r
        while b:
            if b & 1:
                res ^= a
            b >>= 1
            a <<= 1
            if a & top:
                a ^= self.modulus
        return res

    def _slow_pow(self, a: int, e: int) -> int:
        res = 1
        while e:
            if e & 1:
                res = self._slow_mul(res, a)
            a = self._slow_mul(a, a)
            e >>= 1
        return res

    @cached_property
    def kernel_params(self) -> tuple:
        """Field description consumed by the numba kernels.

        ``(r, red, mask, red8, sq, log, exp, clmul)`` where ``red`` is the
        modulus without its leading term, ``red8[t] = t * x^r mod modulus``,
        ``sq[j][b]`` is the square of ``b << 8j`` and ``clmul`` says whether
        the hardware carryless multiply may be used. Small fields carry
        log/exp tables instead; unused slots hold length-1 dummies.
        """
        from ._kernels import HAS_CLMUL

        use_clmul = np.bool_(HAS_CLMUL and self.use_clmul)
        red = self.modulus & self.mask
        dummy_u = np.zeros(1, dtype=np.uint64)
        dummy_i = np.zeros(1, dtype=np.int64)
        tables = self._tables
        if tables is not None:
            log, exp = tables
            return (
                np.int64(self.r),
                np.uint64(red),
                np.uint64(self.mask),
                dummy_u,
                np.zeros((1, 1), dtype=np.uint64),
                log,
                exp,
                use_clmul,
            )
        red8 = np.array(
            [polymod(clmul(t, 1 << self.r), self.modulus) for t in range(256)],
            dtype=np.uint64,
        )
        nbytes = (self.r + 7) // 8
        sq = np.zeros((nbytes, 256), dtype=np.uint64)
        for j in range(nbytes):
            for b in range(256):
                v = (b << (8 * j)) & self.mask
                sq[j, b] = polymod(clmul(v, v), self.modulus)
        return (np.int64(self.r), np.uint64(red), np.uint64(self.mask), red8, sq, dummy_i, dummy_u, use_clmul)

    # -- scalar arithmetic ---------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        tables = self._tables
        if tables is not None:
            if a == 0 or b == 0:
                return 0
            log, exp = tables
            return int(exp[log[a] + log[b]])
        return self._slow_mul(a, b)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        res = 1
        while e:
            if e & 1:
                res = self.mul(res, a)
            a = self.mul(a, a)
            e >>= 1
        return res

    def inv(self, a: int) -> int:
        """Multiplicative inverse by the extended Euclidean algorithm."""
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(2^r)")
        # invariant: g_u * a == u and g_v * a == v (mod modulus)
        u, v = a, self.modulus
        g_u, g_v = 1, 0
        while u != 1:
            j = u.bit_length() - v.bit_length()
            if j < 0:
                u, v = v, u
                g_u, g_v = g_v, g_u
                j = -j
            u ^= v << j
            g_u ^= g_v << j
        return polymod(g_u, self.modulus)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def sqrt(self, a: int) -> int:
        """The unique square root, a^(2^(r-1))."""
        for _ in range(self.r - 1):
            a = self.mul(a, a)
        return a

    # -- randomness ------------------------------------------------------

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.integers(0, self.order, dtype=np.uint64))

    def sample_array(self, rng: np.random.Generator, shape) -> np.ndarray:
        return rng.integers(0, self.order, size=shape, dtype=np.uint64)

    def elements(self):
        return range(self.order)


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator (128-bit state) from an int or a seed sequence."""
    return np.random.Generator(np.random.PCG64(seed))


def sample_uniform(field: GF2m, rng: np.random.Generator) -> FieldElement:
    return field.sample(rng)


def default_field(bits: int = 64) -> GF2m:
    if bits not in SUPPORTED_BITS:
        raise ValueError(f"field bits must be one of {SUPPORTED_BITS}, got {bits}")
    return _cached_field(bits)


_FIELDS: dict[int, GF2m] = {}


def _cached_field(bits: int) -> GF2m:
    if bits not in _FIELDS:
        _FIELDS[bits] = GF2m(bits)
    return _FIELDS[bits]

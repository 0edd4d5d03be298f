"""Determinants, Pfaffians and interpolation over GF(2^r).

Matrices are ``numpy.uint64`` arrays. In characteristic two there are no
signs, so the determinant is the permanent-like sum over permutations and
the Pfaffian is the plain sum over pair partitions.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from . import _kernels as K
from .field import GF2m


def as_matrix(m) -> np.ndarray:
    arr = np.asarray(m, dtype=np.uint64)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {arr.shape}")
    return arr


def determinant(field: GF2m, m) -> int:
    """Determinant by Gaussian elimination; non-square gives 0, 0x0 gives 1."""
    a = as_matrix(m)
    rows, cols = a.shape
    if rows != cols:
        return 0
    if rows == 0:
        return 1
    work = np.ascontiguousarray(a.copy())
    tabs = np.zeros((rows, 256), dtype=np.uint64)
    lrow = np.zeros(rows, dtype=np.int64)
    return int(K.det_inplace(work, rows, field.kernel_params, tabs, lrow))


def check_tutte_shape(m: np.ndarray) -> None:
    if m.shape[0] != m.shape[1]:
        raise ValueError("Pfaffian needs a square matrix")
    if np.any(np.diag(m) != 0):
        raise ValueError("Pfaffian needs a zero diagonal")
    if np.any(m != m.T):
        raise ValueError("Pfaffian needs a symmetric matrix in characteristic two")


def pfaffian(field: GF2m, m) -> int:
    """Pfaffian as the square root of the determinant.

    Valid because pf^2 = det and squaring is a bijection in characteristic
    two. Odd order gives 0 and the empty matrix gives 1.
    """
    a = as_matrix(m)
    check_tutte_shape(a)
    n = a.shape[0]
    if n % 2:
        return 0
    return field.sqrt(determinant(field, a))


def pfaffian_expand(field: GF2m, m) -> int:
    """Pfaffian by summing over all pair partitions (small matrices only)."""
    a = as_matrix(m)
    check_tutte_shape(a)
    n = a.shape[0]
    if n > 12:
        raise ValueError("pair-partition expansion is limited to 12x12")
    if n % 2:
        return 0

    def rec(rest: tuple[int, ...]) -> int:
        if not rest:
            return 1
        i, tail = rest[0], rest[1:]
        total = 0
        for pos, j in enumerate(tail):
            entry = int(a[i, j])
            if entry:
                total ^= field.mul(entry, rec(tail[:pos] + tail[pos + 1 :]))
        return total

    return rec(tuple(range(n)))


def pfaffian_elim(field: GF2m, m) -> int:
    """Pfaffian by skew-symmetric elimination (pairs of rows/columns at once)."""
    a = [[int(v) for v in row] for row in as_matrix(m)]
    check_tutte_shape(np.asarray(a, dtype=np.uint64).reshape(len(a), len(a)))
    n = len(a)
    if n % 2:
        return 0
    pf = 1
    for c in range(0, n, 2):
        p = next((j for j in range(c + 1, n) if a[c][j]), None)
        if p is None:
            return 0
        if p != c + 1:
            # simultaneous row and column swap keeps the matrix symmetric
            a[c + 1], a[p] = a[p], a[c + 1]
            for row in a:
                row[c + 1], row[p] = row[p], row[c + 1]
        piv = a[c][c + 1]
        pf = field.mul(pf, piv)
        inv = field.inv(piv)
        # eliminate coupling of later indices to c and c+1 by congruence
        for i in range(c + 2, n):
            fi = field.mul(a[c][i], inv)
            gi = field.mul(a[c + 1][i], inv)
            for j in range(c + 2, n):
                if i == j:
                    continue
                delta = field.mul(fi, a[c + 1][j]) ^ field.mul(gi, a[c][j])
                a[i][j] ^= delta
    return pf


def evaluate(field: GF2m, coeffs: Sequence[int], z: int) -> int:
    """Horner evaluation of sum c_i z^i."""
    c = np.asarray(coeffs, dtype=np.uint64)
    return int(K.poly_eval(c, np.uint64(z), field.kernel_params))


def interpolate(field: GF2m, points: Sequence[tuple[int, int]], degree: int) -> list[int]:
    """Coefficients c_0..c_L of the unique polynomial of degree <= L through the points."""
    if len(points) != degree + 1:
        raise ValueError(f"need exactly {degree + 1} points for degree {degree}, got {len(points)}")
    zs = [int(z) for z, _ in points]
    if len(set(zs)) != len(zs):
        raise ValueError("interpolation points must be distinct")
    for z, v in points:
        if not (0 <= z < field.order and 0 <= v < field.order):
            raise ValueError("point outside the field")
    coeffs = K.lagrange_coefficients(
        np.asarray(zs, dtype=np.uint64),
        np.asarray([int(v) for _, v in points], dtype=np.uint64),
        field.kernel_params,
    )
    return [int(c) for c in coeffs]

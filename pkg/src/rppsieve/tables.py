"""Component-constrained path weights and their subset-indexed zeta tables.

For a source u, target w and a set I of components containing both
endpoint components, ``d(u, I, w)`` is the least weight of a u-w path that
meets exactly the components in I, one vertex per component (a shared
endpoint component is met at both ends). Metric weights make this
restriction lossless. Every value is capped at budget+1.

The matrix entry ``A_I(u, w)`` is the sum over J <= I of
``x[u, J, w] * z^d(u, J, w)``, i.e. the zeta transform over subsets of the
per-J edge values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .field import GF2m
from .instances import NormalizedEe


@dataclass(frozen=True)
class PathTable:
    """``values[a, b, I]`` is d(sources[a], I, targets[b]).

    ``pmask[a, b]`` is the bitmask of the two endpoint components, or -1 if
    the pair carries no edge (a vertex paired with itself).
    """

    sources: tuple[int, ...]
    targets: tuple[int, ...]
    k: int
    cap: int
    values: np.ndarray
    pmask: np.ndarray

    def get(self, u: int, I: int, w: int) -> int:
        a = self.sources.index(u)
        b = self.targets.index(w)
        if self.pmask[a, b] < 0 or I & self.pmask[a, b] != self.pmask[a, b]:
            raise KeyError(f"d({u}, {I:#b}, {w}) is undefined")
        return int(self.values[a, b, I])


def endpoint_masks(inst: NormalizedEe) -> np.ndarray:
    comp = inst.comp
    src, tgt = inst.sources, inst.targets
    pmask = np.empty((len(src), len(tgt)), dtype=np.int64)
    for a, u in enumerate(src):
        for b, w in enumerate(tgt):
            pmask[a, b] = -1 if u == w else (1 << int(comp[u])) | (1 << int(comp[w]))
    return pmask


def compute_path_table(inst: NormalizedEe) -> PathTable:
    src = np.asarray(inst.sources, dtype=np.int64)
    tgt = np.asarray(inst.targets, dtype=np.int64)
    values = np.full((len(src), len(tgt), 1 << inst.k), inst.cap, dtype=np.int64)
    if len(src) and len(tgt):
        K.path_dp(
            np.ascontiguousarray(inst.weight, dtype=np.int64),
            np.ascontiguousarray(inst.comp, dtype=np.int64),
            inst.k,
            inst.cap,
            src,
            tgt,
            values,
        )
    return PathTable(inst.sources, inst.targets, inst.k, inst.cap, values, endpoint_masks(inst))


def fast_zeta(f) -> np.ndarray:
    """Subset-sum transform over GF(2^r): out[S] = xor of f[A] over A <= S.

    Works along the last axis, whose length must be a power of two.
    """
    out = np.array(f, dtype=np.uint64)
    size = out.shape[-1]
    if size & (size - 1):
        raise ValueError("last axis length must be a power of two")
    lead = out.shape[:-1]
    step = 1
    while step < size:
        view = out.reshape(*lead, size // (2 * step), 2, step)
        view[..., 1, :] ^= view[..., 0, :]
        step *= 2
    return out


def draw_edge_variables(table: PathTable, field: GF2m, rng: np.random.Generator, symmetric: bool) -> np.ndarray:
    """Random x[a, b, I] for every edge (I a superset of the endpoint mask), 0 elsewhere.

    With ``symmetric`` the unordered pair {u, w} shares one variable per I.
    """
    na, nb, size = table.values.shape
    x = field.sample_array(rng, (na, nb, size))
    subsets = np.arange(size, dtype=np.int64)
    valid = (table.pmask[:, :, None] >= 0) & ((subsets[None, None, :] & table.pmask[:, :, None]) == table.pmask[:, :, None])
    x[~valid] = 0
    if symmetric:
        upper = np.triu(np.ones((na, nb), dtype=bool), 1)
        x = np.where(upper[:, :, None], x, np.transpose(x, (1, 0, 2)))
    return np.ascontiguousarray(x)


@dataclass(frozen=True)
class ZetaTables:
    """``entries[a, b, I]`` is A_I(sources[a], targets[b]) at the point ``z``."""

    z: int
    entries: np.ndarray


class ZetaBuilder:
    """Reusable scratch for building zeta tables at many points."""

    def __init__(self, table: PathTable, x: np.ndarray, field: GF2m):
        self.table = table
        self.x = x
        self.field = field
        self.fp = field.kernel_params
        self.ztabs = np.zeros((table.cap + 1, 256), dtype=np.uint64)
        self.zlogs = np.zeros(table.cap + 1, dtype=np.int64)

    def build_into(self, z: int, out: np.ndarray) -> np.ndarray:
        """Fill ``out``, which must start zeroed and is only ever written at edges."""
        zpow = K.power_table(np.uint64(z), self.table.cap, self.fp)
        K.fill_zeta(self.x, self.table.values, self.table.pmask, zpow, out, self.fp, self.ztabs, self.zlogs)
        return out

    def build(self, z: int) -> ZetaTables:
        out = np.zeros_like(self.x)
        return ZetaTables(int(z), self.build_into(z, out))


def build_zeta_tables(table: PathTable, x: np.ndarray, z: int, field: GF2m) -> ZetaTables:
    return ZetaBuilder(table, x, field).build(z)

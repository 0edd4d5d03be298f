"""Evaluation of the sieve polynomials at a point.

For extension instances::

    Q(x, z) = sum over I avoiding component 0 of det A_I * det A_{[k] minus I}

where A_I keeps the sources and targets lying in components of I. In the
undirected case the determinants become Pfaffians of symmetric
zero-diagonal matrices, computed as square roots of determinants.
Over characteristic two only matchings whose paths connect all components
survive the sum.

For conjoining matchings, ``p = sum over S <= F of det A_{-S}`` where
A_{-S} zeroes every entry carrying a request in S; only matchings meeting
every request survive.
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _kernels as K
from .field import GF2m
from .instances import CbmInstance, NormalizedEe
from .tables import PathTable, ZetaBuilder, ZetaTables


def subset_index_lists(vertices, comp, k: int) -> tuple[np.ndarray, np.ndarray]:
    """CSR lists: positions of ``vertices`` whose component lies in I, for every I."""
    comp_bits = np.array([1 << int(comp[v]) for v in vertices], dtype=np.int64)
    ptr = [0]
    idx: list[int] = []
    for I in range(1 << k):
        idx.extend(np.flatnonzero(comp_bits & I).tolist())
        ptr.append(len(idx))
    return np.asarray(ptr, dtype=np.int64), np.asarray(idx, dtype=np.int64)


class _Scratch:
    def __init__(self, size: int):
        size = max(size, 1)
        self.buf = np.zeros((size, size), dtype=np.uint64)
        self.tabs = np.zeros((size, 256), dtype=np.uint64)
        self.lrow = np.zeros(size, dtype=np.int64)


def _subset_dets(tables: ZetaTables, inst: NormalizedEe, field: GF2m, lists=None, scratch=None) -> np.ndarray:
    if lists is None:
        lists = (
            subset_index_lists(inst.sources, inst.comp, inst.k),
            subset_index_lists(inst.targets, inst.comp, inst.k),
        )
    (rptr, ridx), (cptr, cidx) = lists
    if scratch is None:
        scratch = _Scratch(max(len(inst.sources), len(inst.targets)))
    D = np.zeros(1 << inst.k, dtype=np.uint64)
    K.subset_dets(
        tables.entries, rptr, ridx, cptr, cidx, scratch.buf, scratch.tabs, scratch.lrow, field.kernel_params, D
    )
    return D


def eval_Q_directed(tables: ZetaTables, inst: NormalizedEe, field: GF2m) -> int:
    if inst.kind != "directed":
        raise ValueError("directed sieve needs a directed instance")
    if inst.k == 0:
        return 1
    D = _subset_dets(tables, inst, field)
    return int(K.anchored_sum(D, False, field.kernel_params))


def eval_Q_undirected(tables: ZetaTables, inst: NormalizedEe, field: GF2m) -> int:
    if inst.kind != "undirected":
        raise ValueError("undirected sieve needs an undirected instance")
    if inst.k == 0:
        return 1
    A = tables.entries
    if not np.array_equal(A, np.transpose(A, (1, 0, 2))):
        raise ValueError("undirected tables must be symmetric")
    D = _subset_dets(tables, inst, field)
    return int(K.anchored_sum(D, True, field.kernel_params))


@dataclass
class StageTimer:
    """Accumulated seconds per stage (summed over worker threads)."""

    seconds: dict[str, float] = dc_field(default_factory=dict)
    _lock: threading.Lock = dc_field(default_factory=threading.Lock, repr=False, compare=False)

    def add(self, stage: str, dt: float) -> None:
        with self._lock:
            self.seconds[stage] = self.seconds.get(stage, 0.0) + dt


def _chunks(items, parts):
    parts = max(1, min(parts, len(items)))
    return [items[i::parts] for i in range(parts)]


class QEvaluator:
    """Evaluates Q at many points for one fixed draw of the edge variables."""

    def __init__(self, inst: NormalizedEe, table: PathTable, x: np.ndarray, field: GF2m):
        self.inst = inst
        self.table = table
        self.x = x
        self.field = field
        self.lists = (
            subset_index_lists(inst.sources, inst.comp, inst.k),
            subset_index_lists(inst.targets, inst.comp, inst.k),
        )
        self.pf = inst.kind == "undirected"

    def _run(self, zs, timer: StageTimer) -> list[tuple[int, int]]:
        builder = ZetaBuilder(self.table, self.x, self.field)
        out = np.zeros_like(self.x)
        scratch = _Scratch(max(len(self.inst.sources), len(self.inst.targets)))
        fp = self.field.kernel_params
        res = []
        t_zeta = t_sieve = 0.0
        for z in zs:
            t0 = time.perf_counter()
            builder.build_into(z, out)
            t1 = time.perf_counter()
            D = _subset_dets(ZetaTables(z, out), self.inst, self.field, self.lists, scratch)
            res.append((z, int(K.anchored_sum(D, self.pf, fp))))
            t_sieve += time.perf_counter() - t1
            t_zeta += t1 - t0
        timer.add("zeta", t_zeta)
        timer.add("sieve", t_sieve)
        return res

    def values(self, zs, threads: int = 1, timer: StageTimer | None = None) -> list[int]:
        timer = timer if timer is not None else StageTimer()
        zs = [int(z) for z in zs]
        if threads <= 1 or len(zs) < 2:
            pairs = self._run(zs, timer)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = pool.map(lambda c: self._run(c, timer), _chunks(zs, threads))
                pairs = [p for part in parts for p in part]
        lookup = dict(pairs)
        return [lookup[z] for z in zs]


# -- conjoining matchings ------------------------------------------------------


@dataclass(frozen=True)
class MatchingMatrix:
    """Shape data for the conjoining matrix.

    ``rows``/``cols`` list the vertices indexing it (both all vertices for
    the general case). ``exponent`` holds capped edge weights, ``present``
    marks edges and ``request`` the request index of each entry or -1.
    """

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    exponent: np.ndarray
    present: np.ndarray
    request: np.ndarray
    nreq: int
    pf: bool


def matching_matrix(inst: CbmInstance) -> MatchingMatrix:
    if inst.kind == "bipartite":
        rows = tuple(v for v in range(inst.n) if inst.side[v] == 0)
        cols = tuple(v for v in range(inst.n) if inst.side[v] == 1)
    else:
        rows = cols = tuple(range(inst.n))
    ri = {v: i for i, v in enumerate(rows)}
    ci = {v: i for i, v in enumerate(cols)}
    exponent = np.zeros((len(rows), len(cols)), dtype=np.int64)
    present = np.zeros((len(rows), len(cols)), dtype=bool)
    request = np.full((len(rows), len(cols)), -1, dtype=np.int64)
    for (u, v), c in inst.edge_weights().items():
        if inst.kind == "bipartite" and inst.side[u] == 1:
            u, v = v, u
        entries = [(ri[u], ci[v])]
        if inst.kind == "general":
            entries.append((ri[v], ci[u]))
        for a, b in entries:
            exponent[a, b] = min(c, inst.cap)
            present[a, b] = True
            request[a, b] = inst.request_index(u, v)
    return MatchingMatrix(rows, cols, exponent, present, request, len(inst.requests), inst.kind == "general")


def draw_matching_variables(mm: MatchingMatrix, field: GF2m, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Edge variables (symmetric for the general case) and one variable per request."""
    x = field.sample_array(rng, mm.exponent.shape)
    if mm.pf:
        x = np.triu(x, 1)
        x = x | x.T
    x[~mm.present] = 0
    y = field.sample_array(rng, mm.nreq)
    return np.ascontiguousarray(x), y


class PEvaluator:
    """Evaluates p at many points for fixed edge and request variables."""

    def __init__(self, mm: MatchingMatrix, x: np.ndarray, y: np.ndarray, field: GF2m):
        self.mm = mm
        self.field = field
        fp = field.kernel_params
        yfull = np.ones_like(x)
        has = mm.request >= 0
        yfull[has] = y[mm.request[has]]
        self.xy = np.zeros_like(x)
        K.vec_mul(x, yfull, self.xy, fp)
        self.request = np.ascontiguousarray(mm.request)

    def value(self, z: int, scratch: _Scratch | None = None) -> int:
        mm = self.mm
        if len(mm.rows) != len(mm.cols):
            return 0
        n = len(mm.rows)
        if n == 0:
            return 1 if mm.nreq == 0 else 0
        fp = self.field.kernel_params
        zpow = K.power_table(np.uint64(z), int(mm.exponent.max(initial=0)), fp)
        base = np.zeros_like(self.xy)
        K.vec_mul(self.xy, zpow[mm.exponent], base, fp)
        scratch = scratch or _Scratch(n)
        return int(K.masked_subset_sum(base, self.request, mm.nreq, mm.pf, scratch.buf, scratch.tabs, scratch.lrow, fp))

    def values(self, zs, threads: int = 1, timer: StageTimer | None = None) -> list[int]:
        timer = timer if timer is not None else StageTimer()
        zs = [int(z) for z in zs]

        def run(chunk):
            t0 = time.perf_counter()
            scratch = _Scratch(len(self.mm.rows))
            res = [(z, self.value(z, scratch)) for z in chunk]
            timer.add("sieve", time.perf_counter() - t0)
            return res

        if threads <= 1 or len(zs) < 2:
            pairs = run(zs)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                pairs = [p for part in pool.map(run, _chunks(zs, threads)) for p in part]
        lookup = dict(pairs)
        return [lookup[z] for z in zs]


def eval_p_cbm(inst: CbmInstance, x: np.ndarray, y: np.ndarray, z: int, field: GF2m) -> int:
    """p at z; ``x`` is indexed like :func:`matching_matrix` rows/cols."""
    if inst.kind != "bipartite":
        raise ValueError("eval_p_cbm needs a bipartite instance")
    return PEvaluator(matching_matrix(inst), x, y, field).value(z)


def eval_p_cgm(inst: CbmInstance, x: np.ndarray, y: np.ndarray, z: int, field: GF2m) -> int:
    """p at z using Pfaffians of the symmetric Tutte-style matrix."""
    if inst.kind != "general":
        raise ValueError("eval_p_cgm needs a general instance")
    mm = matching_matrix(inst)
    if inst.n % 2:
        return 0
    return PEvaluator(mm, x, y, field).value(z)

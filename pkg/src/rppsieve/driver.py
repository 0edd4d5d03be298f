"""Randomized decision procedure with an explicit one-sided error bound.

Per round the edge variables are drawn once, the sieve polynomial is
evaluated at the integers 0..L (read as field elements) and interpolated.
A nonzero coefficient c_i with i <= budget certifies a solution of weight i,
so YES answers are always correct. A NO is wrong only if every relevant
coefficient polynomial vanished at the random point; by Schwartz-Zippel that
happens with probability at most ``(budget+1) * deg / 2^r`` per round.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .field import GF2m, make_rng
from .instances import CbmInstance, EeInstance, NormalizedEe, RppInstance, normalize, rpp_to_ee
from .linalg import interpolate
from .sieve import (
    PEvaluator,
    QEvaluator,
    StageTimer,
    draw_matching_variables,
    matching_matrix,
)
from .tables import compute_path_table, draw_edge_variables


@dataclass(frozen=True)
class DriverConfig:
    field_bits: int = 64
    reps: int = 2
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("need at least one repetition")
        if self.threads < 1:
            raise ValueError("need at least one thread")

    @property
    def field(self) -> GF2m:
        return _field(self.field_bits)


_FIELD_CACHE: dict[int, GF2m] = {}


def _field(bits: int) -> GF2m:
    if bits not in _FIELD_CACHE:
        _FIELD_CACHE[bits] = GF2m(bits)
    return _FIELD_CACHE[bits]


@dataclass
class Verdict:
    """Outcome of a decision run.

    ``log2_bound`` is log2 of the probability that a NO (or a reported
    minimum weight that is too high) is wrong; ``-inf`` means exact.
    """

    answer: bool
    min_weight: int | None
    log2_bound: float
    seed: int
    k: int = 0
    m: int = 0
    L: int = 0
    r: int = 0
    reps: int = 0
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def failure_bound(self) -> float:
        return 0.0 if self.log2_bound == -math.inf else 2.0**self.log2_bound

    def summary(self) -> str:
        ans = "YES" if self.answer else "NO"
        mw = "-" if self.min_weight is None else str(self.min_weight)
        if self.log2_bound == -math.inf:
            bound = "0"
        else:
            bound = f"2^-{-self.log2_bound:.1f}" if self.log2_bound < 0 else f"2^{self.log2_bound:.1f}"
        return f"answer={ans} min_weight={mw} error_bound={bound} k={self.k} seed={self.seed}"


def round_log2_bound(budget: int, degree: int, r: int) -> float:
    """log2 of (budget+1) * degree / 2^r, clipped at 0 (a probability)."""
    if degree == 0:
        return -math.inf
    return min(0.0, math.log2((budget + 1) * degree) - r)


def _round_rng(seed: int, rnd: int) -> np.random.Generator:
    return make_rng(np.random.SeedSequence([seed, rnd]))


def _check_field(field: GF2m, L: int) -> None:
    if field.order < L + 2:
        raise ValueError(f"field GF(2^{field.r}) has fewer than L+2 = {L + 2} elements; raise --field-bits")


def _min_coefficient(field: GF2m, values: list[int], L: int, budget: int) -> int | None:
    coeffs = interpolate(field, list(zip(range(L + 1), values)), L)
    for i, c in enumerate(coeffs[: budget + 1]):
        if c:
            return i
    return None


def _merge(best: int | None, found: int | None) -> int | None:
    if found is None:
        return best
    return found if best is None else min(best, found)


def decide_ee(inst: NormalizedEe, cfg: DriverConfig = DriverConfig(), timer: StageTimer | None = None) -> Verdict:
    timer = timer if timer is not None else StageTimer()
    field = cfg.field
    if inst.k == 0:
        return Verdict(True, 0, -math.inf, cfg.seed, 0, 0, 0, field.r, cfg.reps, dict(timer.seconds))
    m = inst.m
    L = m * inst.cap
    _check_field(field, L)
    t0 = time.perf_counter()
    table = compute_path_table(inst)
    timer.add("path_dp", time.perf_counter() - t0)
    best = None
    for rnd in range(cfg.reps):
        rng = _round_rng(cfg.seed, rnd)
        x = draw_edge_variables(table, field, rng, symmetric=inst.kind == "undirected")
        values = QEvaluator(inst, table, x, field).values(range(L + 1), cfg.threads, timer)
        t0 = time.perf_counter()
        best = _merge(best, _min_coefficient(field, values, L, inst.budget))
        timer.add("interpolate", time.perf_counter() - t0)
    bound = cfg.reps * round_log2_bound(inst.budget, m, field.r)
    return Verdict(best is not None, best, bound, cfg.seed, inst.k, m, L, field.r, cfg.reps, dict(timer.seconds))


def decide_eulerian_extension(inst: EeInstance, cfg: DriverConfig = DriverConfig()) -> Verdict:
    timer = StageTimer()
    t0 = time.perf_counter()
    ne = normalize(inst)
    timer.add("reduce", time.perf_counter() - t0)
    return decide_ee(ne, cfg, timer)


def _decide_rpp(inst: RppInstance, cfg: DriverConfig, kind: str) -> Verdict:
    if inst.kind != kind:
        raise ValueError(f"expected a {kind} instance")
    timer = StageTimer()
    t0 = time.perf_counter()
    inst.validate()
    ne = normalize(rpp_to_ee(inst))
    timer.add("reduce", time.perf_counter() - t0)
    return decide_ee(ne, cfg, timer)


def decide_drpp(inst: RppInstance, cfg: DriverConfig = DriverConfig()) -> Verdict:
    """Is there a closed walk through all required arcs of weight <= w(R) + budget?"""
    return _decide_rpp(inst, cfg, "directed")


def decide_urpp(inst: RppInstance, cfg: DriverConfig = DriverConfig()) -> Verdict:
    return _decide_rpp(inst, cfg, "undirected")


def _decide_matching(inst: CbmInstance, cfg: DriverConfig) -> Verdict:
    timer = StageTimer()
    field = cfg.field
    nreq = len(inst.requests)
    t0 = time.perf_counter()
    mm = matching_matrix(inst)
    timer.add("reduce", time.perf_counter() - t0)
    side = len(mm.rows) if inst.kind == "bipartite" else inst.n // 2
    if len(mm.rows) != len(mm.cols) or (inst.kind == "general" and inst.n % 2):
        return Verdict(False, None, -math.inf, cfg.seed, nreq, side, 0, field.r, cfg.reps, dict(timer.seconds))
    L = side * int(mm.exponent[mm.present].max(initial=0))
    _check_field(field, L)
    best = None
    for rnd in range(cfg.reps):
        rng = _round_rng(cfg.seed, rnd)
        x, y = draw_matching_variables(mm, field, rng)
        values = PEvaluator(mm, x, y, field).values(range(L + 1), cfg.threads, timer)
        t0 = time.perf_counter()
        best = _merge(best, _min_coefficient(field, values, L, inst.budget))
        timer.add("interpolate", time.perf_counter() - t0)
    degree = side + nreq * side
    bound = cfg.reps * round_log2_bound(inst.budget, degree, field.r)
    return Verdict(best is not None, best, bound, cfg.seed, nreq, side, L, field.r, cfg.reps, dict(timer.seconds))


def decide_cbm(inst: CbmInstance, cfg: DriverConfig = DriverConfig()) -> Verdict:
    if inst.kind != "bipartite":
        raise ValueError("decide_cbm needs a bipartite instance")
    return _decide_matching(inst, cfg)


def decide_cgm(inst: CbmInstance, cfg: DriverConfig = DriverConfig()) -> Verdict:
    if inst.kind != "general":
        raise ValueError("decide_cgm needs a general instance")
    return _decide_matching(inst, cfg)


def solve(inst, cfg: DriverConfig = DriverConfig()) -> Verdict:
    """Dispatch on the instance type."""
    if isinstance(inst, RppInstance):
        return decide_drpp(inst, cfg) if inst.kind == "directed" else decide_urpp(inst, cfg)
    if isinstance(inst, EeInstance):
        return decide_eulerian_extension(inst, cfg)
    if isinstance(inst, NormalizedEe):
        return decide_ee(inst, cfg)
    if isinstance(inst, CbmInstance):
        return decide_cbm(inst, cfg) if inst.kind == "bipartite" else decide_cgm(inst, cfg)
    raise TypeError(f"cannot solve {type(inst).__name__}")

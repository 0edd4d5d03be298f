"""Slow, independent ground truth for every stage.

* :func:`rpp_walk_optimum` / :func:`ee_walk_optimum` search closed walks
  directly (Dijkstra over vertex x covered-required-set states).
* :func:`brute_force_ee` minimizes over perfect matchings of the explicit
  auxiliary graph whose edges (u, I, w) stand for component-constrained
  paths, keeping those whose I sets connect every component.
* :func:`symbolic_Q` expands the sieve polynomial term by term with integer
  multiplicities.
* :func:`brute_force_cbm` / :func:`brute_force_cgm` enumerate matchings.

None of these share code with the compiled engines.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .field import GF2m
from .instances import CbmInstance, EeInstance, NormalizedEe, RppInstance

INFEASIBLE = None


class OracleSizeError(ValueError):
    """The instance is too large for exhaustive search."""


def cap_optimum(opt: int | None, budget: int) -> int | None:
    """Optimum if within budget, else None."""
    return opt if opt is not None and opt <= budget else None


# -- walk search -----------------------------------------------------------------


def _walk_search(n: int, start: int, nreq: int, moves, once: bool = False) -> int | None:
    """Least cost of a closed walk from ``start`` covering every required index.

    ``moves(v)`` yields (next vertex, cost, required index or -1). With
    ``once`` a required move can only be taken while its index is uncovered,
    so each required pair is used exactly once.
    """
    full = (1 << nreq) - 1
    dist = {(start, 0): 0}
    heap = [(0, start, 0)]
    while heap:
        d, v, mask = heapq.heappop(heap)
        if d > dist.get((v, mask), math.inf):
            continue
        if v == start and mask == full:
            return d
        for y, c, j in moves(v):
            if once and j >= 0 and mask >> j & 1:
                continue
            nm = mask | (1 << j) if j >= 0 else mask
            nd = d + c
            if nd < dist.get((y, nm), math.inf):
                dist[(y, nm)] = nd
                heapq.heappush(heap, (nd, y, nm))
    return None


MAX_WALK_REQUIRED = 16


def rpp_walk_optimum(inst: RppInstance) -> int | None:
    """Least extension weight (walk weight minus w(R)), or None if no walk exists."""
    req = [a for a in inst.arcs if a.required]
    if not req:
        return 0
    if len(req) > MAX_WALK_REQUIRED:
        raise OracleSizeError(f"{len(req)} required arcs exceed the walk oracle limit")
    out: list[list[tuple[int, int, int]]] = [[] for _ in range(inst.n)]
    j = 0
    for a in inst.arcs:
        idx = -1
        if a.required:
            idx = j
            j += 1
        out[a.tail].append((a.head, a.weight, idx))
        if inst.kind == "undirected":
            out[a.head].append((a.tail, a.weight, idx))
    walk = _walk_search(inst.n, req[0].tail, len(req), lambda v: out[v])
    return None if walk is None else walk - inst.required_weight


def ee_walk_optimum(inst: EeInstance) -> int | None:
    """Least extension weight by walk search: each required pair is traversed
    exactly once for free, and every other step pays its extension weight."""
    if not inst.required:
        return 0
    if len(inst.required) > MAX_WALK_REQUIRED:
        raise OracleSizeError(f"{len(inst.required)} required pairs exceed the walk oracle limit")
    out: list[list[tuple[int, int, int]]] = [[] for _ in range(inst.n)]
    for j, (u, v) in enumerate(inst.required):
        out[u].append((v, 0, j))
        if inst.kind == "undirected":
            out[v].append((u, 0, j))
    for u in range(inst.n):
        for v in range(inst.n):
            if u != v:
                out[u].append((v, int(inst.weight[u, v]), -1))
    return _walk_search(inst.n, inst.required[0][0], len(inst.required), lambda v: out[v], once=True)


# -- explicit matching graph -------------------------------------------------------

MAX_PATH_ENUMERATION = 2_000_000


def brute_force_paths(inst: NormalizedEe, u: int, I: int, w: int) -> int:
    """d(u, I, w) by trying every order of the inner components and every vertex choice."""
    cu, cw = int(inst.comp[u]), int(inst.comp[w])
    if not (I >> cu) & 1 or not (I >> cw) & 1:
        raise ValueError("I must contain both endpoint components")
    inner = [c for c in range(inst.k) if (I >> c) & 1 and c not in (cu, cw)]
    members = [[v for v in range(inst.n) if inst.comp[v] == c] for c in inner]
    work = math.factorial(len(inner)) * math.prod(len(mm) for mm in members) if inner else 1
    if work > MAX_PATH_ENUMERATION:
        raise OracleSizeError(f"path enumeration of {work} candidates is too large")
    w_ = inst.weight
    best = inst.cap
    for order in itertools.permutations(range(len(inner))):
        for choice in itertools.product(*(members[i] for i in order)):
            seq = (u, *choice, w)
            best = min(best, sum(int(w_[a, b]) for a, b in zip(seq, seq[1:])))
    return min(best, inst.cap)


@dataclass(frozen=True)
class ExplicitMatchingGraph:
    """Edges (a, I, b, weight) between sources[a] and targets[b]."""

    sources: tuple[int, ...]
    targets: tuple[int, ...]
    k: int
    edges: tuple[tuple[int, int, int, int], ...]


def explicit_matching_graph(inst: NormalizedEe) -> ExplicitMatchingGraph:
    edges = []
    undirected = inst.kind == "undirected"
    for a, u in enumerate(inst.sources):
        for b, w in enumerate(inst.targets):
            if u == w or (undirected and b < a):
                continue
            need = (1 << int(inst.comp[u])) | (1 << int(inst.comp[w]))
            for I in range(1 << inst.k):
                if I & need == need:
                    edges.append((a, I, b, brute_force_paths(inst, u, I, w)))
    return ExplicitMatchingGraph(inst.sources, inst.targets, inst.k, tuple(edges))


def _partitions(k: int) -> list[tuple[int, ...]]:
    """All set partitions of range(k) as canonical block-label tuples."""
    out = []

    def rec(prefix, top):
        if len(prefix) == k:
            out.append(tuple(prefix))
            return
        for lab in range(top + 1):
            rec(prefix + [lab], max(top, lab + 1) if lab == top else top)

    rec([], 0)
    return out


def _canon(labels) -> tuple[int, ...]:
    seen: dict[int, int] = {}
    return tuple(seen.setdefault(x, len(seen)) for x in labels)


def _join(part: tuple[int, ...], I: int) -> tuple[int, ...]:
    touched = {part[c] for c in range(len(part)) if (I >> c) & 1}
    if len(touched) <= 1:
        return part
    tgt = min(touched)
    return _canon(tgt if x in touched else x for x in part)


def quotient_components(k: int, sets) -> int:
    """Number of blocks after joining the components named by each bitmask in ``sets``."""
    part = tuple(range(k))
    for I in sets:
        part = _join(part, I)
    return len(set(part))


MAX_MATCHING_SIZE = 18


def brute_force_ee(inst: NormalizedEe, graph: ExplicitMatchingGraph | None = None) -> int | None:
    """Least weight of a perfect matching whose path sets connect all components.

    Exhaustive dynamic program over (matched target set, component partition);
    the directed case matches sources in order, the undirected case always
    matches the lowest unmatched odd vertex. Weights at the cap count as
    budget+1, so any result above the budget means "no solution".
    """
    if inst.k == 0:
        return 0
    src, tgt = inst.sources, inst.targets
    if len(src) > MAX_MATCHING_SIZE:
        raise OracleSizeError(f"matching side {len(src)} exceeds {MAX_MATCHING_SIZE}")
    graph = graph or explicit_matching_graph(inst)
    parts = _partitions(inst.k)
    pidx = {p: i for i, p in enumerate(parts)}
    size = 1 << inst.k
    join = np.array([[pidx[_join(p, I)] for I in range(size)] for p in parts], dtype=np.int64)
    nt = len(tgt)
    big = np.iinfo(np.int64).max // 4
    cost = np.full((len(src), nt, size), big, dtype=np.int64)
    for a, I, b, c in graph.edges:
        cost[a, b, I] = c
        if inst.kind == "undirected":
            cost[b, a, I] = c
    dp = np.full((1 << nt, len(parts)), big, dtype=np.int64)
    dp[0, pidx[tuple(range(inst.k))]] = 0

    def relax(cur, new, a, b):
        block = dp[cur]
        for I in range(size):
            c = cost[a, b, I]
            if c >= big:
                continue
            for p in range(len(parts)):
                q = join[p, I]
                dp[new, q] = np.minimum(dp[new, q], block[:, p] + c)

    if inst.kind == "directed":
        masks = np.arange(1 << nt, dtype=np.int64)
        popcount = np.array([bin(x).count("1") for x in range(1 << nt)])
        for a in range(len(src)):
            layer = masks[popcount == a]
            for b in range(nt):
                cur = layer[(layer >> b) & 1 == 0]
                if len(cur):
                    relax(cur, cur | (1 << b), a, b)
    else:
        # pair the lowest unmatched odd vertex a with some later b; the
        # reachable masks then have bits 0..a-1 set and bit a clear
        for a in range(nt):
            high = np.arange(1 << (nt - a - 1), dtype=np.int64)
            layer = ((1 << a) - 1) | (high << (a + 1))
            for b in range(a + 1, nt):
                cur = layer[(layer >> b) & 1 == 0]
                if len(cur):
                    relax(cur, cur | (1 << a) | (1 << b), a, b)
    best = int(dp[(1 << nt) - 1, pidx[tuple([0] * inst.k)]])
    return None if best >= big else best


def enumerate_matchings(inst: NormalizedEe, graph: ExplicitMatchingGraph | None = None):
    """Yield (edges, weight, rho) for every perfect matching (tiny instances only)."""
    graph = graph or explicit_matching_graph(inst)
    m = len(inst.sources)
    if m > (10 if inst.kind == "undirected" else 6):
        raise OracleSizeError("explicit enumeration is limited to matchings of size 5 or 6")
    by_pair: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for a, I, b, c in graph.edges:
        by_pair.setdefault((a, b), []).append((I, c))
        if inst.kind == "undirected":
            by_pair.setdefault((b, a), []).append((I, c))
    if inst.kind == "directed":
        pairings = [list(enumerate(perm)) for perm in itertools.permutations(range(m))]
    else:
        pairings = list(_pair_partitions(list(range(m))))
    for pairing in pairings:
        options = [by_pair.get(pair, []) for pair in pairing]
        for pick in itertools.product(*options):
            edges = frozenset((a, I, b) for (a, b), (I, _) in zip(pairing, pick))
            weight = sum(c for _, c in pick)
            rho = quotient_components(inst.k, [I for I, _ in pick])
            yield edges, weight, rho


def _pair_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for i, other in enumerate(rest):
        for tail in _pair_partitions(rest[:i] + rest[i + 1 :]):
            yield [(first, other)] + tail


def brute_force_ee_enumerate(inst: NormalizedEe) -> int | None:
    """Same answer as :func:`brute_force_ee`, by listing every matching."""
    if inst.k == 0:
        return 0
    best = None
    for _, weight, rho in enumerate_matchings(inst):
        if rho == 1 and (best is None or weight < best):
            best = weight
    return best


# -- symbolic expansion ------------------------------------------------------------


@dataclass
class SymbolicQ:
    """Expansion of Q before reduction mod 2.

    ``multiplicity[M]`` counts how often matching M (a frozenset of edges
    (a, I, b)) is generated across all anchored bipartitions; ``rho[M]`` is
    the number of component blocks its paths leave; ``degree[M]`` its z
    degree. ``survivors`` are the matchings with odd multiplicity.
    """

    multiplicity: Counter
    rho: dict
    degree: dict

    @property
    def survivors(self) -> set:
        return {M for M, c in self.multiplicity.items() if c % 2}

    def evaluate(self, field: GF2m, x_of, z: int) -> int:
        """Value of the surviving polynomial; ``x_of(a, I, b)`` gives each variable."""
        total = 0
        for M in self.survivors:
            term = field.pow(z, self.degree[M])
            for a, I, b in M:
                term = field.mul(term, x_of(a, I, b))
            total ^= term
        return total


def symbolic_Q(inst: NormalizedEe) -> SymbolicQ:
    m = len(inst.sources)
    if m > 4 * (2 if inst.kind == "undirected" else 1) or inst.k > 3:
        raise OracleSizeError("symbolic expansion is limited to matchings of size 4 and k <= 3")
    graph = explicit_matching_graph(inst)
    weight = {}
    for a, I, b, c in graph.edges:
        weight[(a, I, b)] = c
    comp_s = [int(inst.comp[v]) for v in inst.sources]
    comp_t = [int(inst.comp[v]) for v in inst.targets]
    full = (1 << inst.k) - 1
    undirected = inst.kind == "undirected"

    def entry_options(a, b, I):
        """Edges contributing to A_I(a, b)."""
        if undirected and a == b:
            return []
        lo, hi = (min(a, b), max(a, b)) if undirected else (a, b)
        need = (1 << comp_s[a]) | (1 << comp_t[b])
        return [(lo, J, hi) for J in range(1 << inst.k) if J & need == need and J & ~I == 0]

    def terms(I):
        """Counter of edge multisets from the Leibniz/pair-partition expansion of A_I."""
        rows = [a for a in range(m) if (I >> comp_s[a]) & 1]
        cols = [b for b in range(len(inst.targets)) if (I >> comp_t[b]) & 1]
        out: Counter = Counter()
        if undirected:
            if len(rows) % 2:
                return out
            for pairing in _pair_partitions(rows):
                for pick in itertools.product(*(entry_options(a, b, I) for a, b in pairing)):
                    out[frozenset(pick)] += 1
            return out
        if len(rows) != len(cols):
            return out
        for perm in itertools.permutations(cols):
            for pick in itertools.product(*(entry_options(a, b, I) for a, b in zip(rows, perm))):
                out[frozenset(pick)] += 1
        return out

    mult: Counter = Counter()
    for I in range(0, full + 1, 2):
        left, right = terms(I), terms(full ^ I)
        for A, ca in left.items():
            for B, cb in right.items():
                mult[A | B] += ca * cb
    rho = {M: quotient_components(inst.k, [J for _, J, _ in M]) for M in mult}
    degree = {M: sum(weight[e] for e in M) for M in mult}
    return SymbolicQ(mult, rho, degree)


# -- conjoining matchings -----------------------------------------------------------


def _matching_ok(inst: CbmInstance, pairs) -> bool:
    met = {(min(inst.part[u], inst.part[v]), max(inst.part[u], inst.part[v])) for u, v in pairs}
    return all(f in met for f in inst.requests)


def brute_force_cbm(inst: CbmInstance) -> int | None:
    """Least weight of a perfect matching meeting every request, over all bijections."""
    left = [v for v in range(inst.n) if inst.side[v] == 0]
    right = [v for v in range(inst.n) if inst.side[v] == 1]
    if len(left) != len(right):
        return None
    if len(left) > 7:
        raise OracleSizeError("bipartite enumeration is limited to 7 vertices per side")
    wt = inst.edge_weights()
    best = None
    for perm in itertools.permutations(right):
        pairs = list(zip(left, perm))
        keys = [(min(u, v), max(u, v)) for u, v in pairs]
        if not all(k in wt for k in keys) or not _matching_ok(inst, pairs):
            continue
        total = sum(wt[k] for k in keys)
        best = total if best is None else min(best, total)
    return best


def brute_force_cgm(inst: CbmInstance) -> int | None:
    """Least weight of a perfect matching meeting every request, over all pair partitions."""
    if inst.n % 2:
        return None
    if inst.n > 12:
        raise OracleSizeError("general enumeration is limited to 12 vertices")
    wt = inst.edge_weights()
    best = None
    for pairs in _pair_partitions(list(range(inst.n))):
        if not all(p in wt for p in pairs) or not _matching_ok(inst, pairs):
            continue
        total = sum(wt[p] for p in pairs)
        best = total if best is None else min(best, total)
    return best

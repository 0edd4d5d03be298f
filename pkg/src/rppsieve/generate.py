"""Seeded random instance generators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import make_rng
from .instances import Arc, CbmInstance, EeInstance, RppInstance


@dataclass(frozen=True)
class GenConfig:
    """Parameters shared by the generators.

    ``required_vertices`` caps how many vertices the required pieces touch
    (default: all n). ``extra`` is the expected number of additional required
    arcs per piece beyond a spanning tree, which creates imbalance and
    parallel arcs. ``density`` is the probability of each optional arc.
    With ``routes`` each piece is instead a single directed path through its
    vertices, so only the two ends are unbalanced. ``even_split`` makes the
    pieces as equal in size as possible instead of cutting at random.
    """

    n: int = 8
    k: int = 2
    min_weight: int = 1
    max_weight: int = 5
    density: float = 0.3
    budget: int | None = None
    required_vertices: int | None = None
    extra: float = 0.5
    routes: bool = False
    even_split: bool = False


def _pieces(rng, n: int, k: int, used: int, even: bool = False) -> list[list[int]]:
    if not 0 <= k <= used <= n:
        raise ValueError(f"need 0 <= k <= required vertices <= n, got k={k}, used={used}, n={n}")
    if k == 0:
        return []
    chosen = [int(v) for v in rng.permutation(n)[:used]]
    if even:
        cuts = [(i * used) // k for i in range(1, k)]
    elif k > 1:
        cuts = sorted(int(c) for c in rng.choice(np.arange(1, used), size=k - 1, replace=False))
    else:
        cuts = []
    bounds = [0, *cuts, used]
    return [chosen[bounds[i] : bounds[i + 1]] for i in range(k)]


def _required_arcs(rng, piece: list[int], extra: float, route: bool = False) -> list[tuple[int, int]]:
    """A connected required multigraph on ``piece`` (a self-loop for a single vertex)."""
    if len(piece) == 1:
        return [(piece[0], piece[0])]
    if route:
        return list(zip(piece[:-1], piece[1:]))
    arcs = []
    for i in range(1, len(piece)):
        j = int(rng.integers(0, i))
        u, v = piece[i], piece[j]
        arcs.append((u, v) if rng.random() < 0.5 else (v, u))
    for _ in range(int(rng.poisson(extra * len(piece)))):
        u, v = (int(x) for x in rng.choice(piece, size=2, replace=False))
        arcs.append((u, v))
    return arcs


def _default_budget(rng, cfg: GenConfig) -> int:
    return int(rng.integers(0, 2 * cfg.max_weight * max(cfg.k, 1) + 1))


def random_rpp(cfg: GenConfig, seed, directed: bool = True) -> RppInstance:
    """k required pieces plus optional arcs, with a Hamiltonian cycle of optional
    arcs guaranteeing (strong) connectivity."""
    rng = make_rng(seed)
    n = cfg.n
    used = cfg.required_vertices if cfg.required_vertices is not None else n
    pieces = _pieces(rng, n, cfg.k, used, cfg.even_split)

    def weight():
        return int(rng.integers(cfg.min_weight, cfg.max_weight + 1))

    arcs = []
    for piece in pieces:
        arcs += [Arc(u, v, weight(), True) for u, v in _required_arcs(rng, piece, cfg.extra, cfg.routes)]
    order = [int(v) for v in rng.permutation(n)]
    if n > 1:
        arcs += [Arc(order[i], order[(i + 1) % n], weight(), False) for i in range(n)]
    for u in range(n):
        for v in range(n):
            if u != v and (directed or u < v) and rng.random() < cfg.density:
                arcs.append(Arc(u, v, weight(), False))
    budget = cfg.budget if cfg.budget is not None else _default_budget(rng, cfg)
    return RppInstance("directed" if directed else "undirected", n, tuple(arcs), budget)


def random_ee(cfg: GenConfig, seed, directed: bool = True) -> EeInstance:
    """Required pieces on all vertices and arbitrary (not necessarily metric) weights."""
    rng = make_rng(seed)
    n = cfg.n
    pieces = _pieces(rng, n, cfg.k, n, cfg.even_split)
    required = []
    for piece in pieces:
        required += _required_arcs(rng, piece, cfg.extra, cfg.routes)
    budget = cfg.budget if cfg.budget is not None else _default_budget(rng, cfg)
    w = rng.integers(cfg.min_weight, cfg.max_weight + 1, size=(n, n))
    if not directed:
        w = np.triu(w, 1)
        w = w + w.T
    return EeInstance("directed" if directed else "undirected", n, tuple(required), w, budget)


@dataclass(frozen=True)
class MatchingGenConfig:
    side: int = 4
    classes: int = 3
    requests: int = 2
    density: float = 0.6
    min_weight: int = 0
    max_weight: int = 4
    budget: int | None = None


def random_cbm(cfg: MatchingGenConfig, seed, bipartite: bool = True) -> CbmInstance:
    """Random conjoining matching instance; general instances have 2*side vertices."""
    rng = make_rng(seed)
    n = 2 * cfg.side
    part = tuple(int(p) for p in rng.integers(0, cfg.classes, size=n))
    side = tuple([0] * cfg.side + [1] * cfg.side) if bipartite else None
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if bipartite and side[u] == side[v]:
                continue
            if rng.random() < cfg.density:
                edges.append((u, v, int(rng.integers(cfg.min_weight, cfg.max_weight + 1))))
    pairs = [(i, j) for i in range(cfg.classes) for j in range(i + 1, cfg.classes)]
    take = min(cfg.requests, len(pairs))
    picks = rng.choice(len(pairs), size=take, replace=False) if take else []
    requests = tuple(pairs[int(i)] for i in sorted(picks))
    budget = cfg.budget if cfg.budget is not None else int(rng.integers(0, cfg.max_weight * cfg.side + 1))
    return CbmInstance("bipartite" if bipartite else "general", n, part, tuple(edges), requests, budget, side)


def random_normalized(seed, directed: bool = True, k: int = 2, m: int = 2, extra: int = 1, budget: int = 6, max_weight: int = 4):
    """A synthetic sieve-ready instance: random components, endpoints and metric weights.

    There is no underlying required multigraph; the sieve and the oracles
    only look at components, endpoints and weights. Directed instances have
    m sources and m targets, undirected ones 2m odd vertices. ``extra``
    vertices are neither, serving only as path waypoints.
    """
    from .instances import NormalizedEe, shortest_paths

    rng = make_rng(seed)
    ends = 2 * m
    n = max(ends + extra, k)
    comp = np.concatenate([np.arange(k), rng.integers(0, k, size=n - k)])
    rng.shuffle(comp)
    # renumber so component 0 holds vertex 0, and so on in order of first appearance
    relabel: dict[int, int] = {}
    comp = np.array([relabel.setdefault(int(c), len(relabel)) for c in comp], dtype=np.int64)
    w = rng.integers(0, max_weight + 1, size=(n, n))
    if not directed:
        w = np.triu(w, 1)
        w = w + w.T
    w = shortest_paths(w, budget + 1)
    order = [int(v) for v in rng.permutation(n)]
    if directed:
        U, W, O = tuple(sorted(order[:m])), tuple(sorted(order[m:ends])), ()
    else:
        U, W = (), ()
        # each component must hold an even number of odd vertices
        O = _even_odd_set(rng, comp, k, ends)
    comp.setflags(write=False)
    return NormalizedEe(
        "directed" if directed else "undirected", n, (), w, budget, comp, k, U, W, O, tuple(range(n))
    )


def _even_odd_set(rng, comp, k, size):
    groups = [[v for v in range(len(comp)) if comp[v] == c] for c in range(k)]
    picked: list[int] = []
    for g in rng.permutation(k):
        g = [int(v) for v in rng.permutation(groups[g])]
        room = min(len(g) - len(g) % 2, size - len(picked))
        take = 2 * int(rng.integers(0, room // 2 + 1))
        picked += g[:take]
    return tuple(sorted(picked))

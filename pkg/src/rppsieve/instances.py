"""Instance model and the reductions between rural postman and Eulerian extension.

Vertices are 0-based ints everywhere in the library; the text format is
1-based and converted in :mod:`rppsieve.io`.

Pipeline for a directed instance::

    rpp_to_ee -> normalize_balances -> metric_close -> no_cycles_transform
              -> analyze_components

The undirected pipeline skips :func:`normalize_balances`.

Balance is in-degree minus out-degree. A vertex of balance +1 needs one more
outgoing extension arc, so extension paths start in U (balance +1) and end
in W (balance -1).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

Kind = Literal["directed", "undirected"]

# Totals are bounded by (budget+1) * n^2 and must fit comfortably in int64.
MAX_WEIGHT_TOTAL = 1 << 62


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    weight: int
    required: bool = False


@dataclass(frozen=True)
class RppInstance:
    """Rural postman: find a closed walk through every required arc of weight <= w(R) + budget."""

    kind: Kind
    n: int
    arcs: tuple[Arc, ...]
    budget: int

    def __post_init__(self):
        object.__setattr__(self, "arcs", tuple(self.arcs))
        _check_kind(self.kind)
        if self.n < 0 or self.budget < 0:
            raise ValueError("vertex count and budget must be nonnegative")
        for a in self.arcs:
            if not (0 <= a.tail < self.n and 0 <= a.head < self.n):
                raise ValueError(f"arc {a} has an endpoint outside 0..{self.n - 1}")
            if a.weight < 0:
                raise ValueError(f"arc {a} has negative weight")
        _check_overflow(self.n, self.budget)

    @property
    def required(self) -> list[Arc]:
        return [a for a in self.arcs if a.required]

    @property
    def required_weight(self) -> int:
        return sum(a.weight for a in self.arcs if a.required)

    def validate(self) -> None:
        """Reject inputs that are not (strongly) connected."""
        if not is_connected(self.n, [(a.tail, a.head) for a in self.arcs], self.kind == "directed"):
            what = "strongly connected" if self.kind == "directed" else "connected"
            raise ValueError(f"{self.kind} rural postman input must be {what}")


@dataclass(frozen=True)
class EeInstance:
    """Eulerian extension: required multigraph plus all-pairs extension weights.

    ``labels[v]`` names vertex v in the instance this one was derived from.
    """

    kind: Kind
    n: int
    required: tuple[tuple[int, int], ...]
    weight: np.ndarray
    budget: int
    labels: tuple[int, ...] | None = None

    def __post_init__(self):
        _check_kind(self.kind)
        object.__setattr__(self, "required", tuple((int(u), int(v)) for u, v in self.required))
        w = np.array(self.weight, dtype=np.int64).reshape(self.n, self.n)
        np.fill_diagonal(w, 0)
        w.setflags(write=False)
        object.__setattr__(self, "weight", w)
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(range(self.n)))
        else:
            object.__setattr__(self, "labels", tuple(int(x) for x in self.labels))
        if len(self.labels) != self.n:
            raise ValueError("labels must name every vertex")
        if self.budget < 0:
            raise ValueError("budget must be nonnegative")
        if (w < 0).any():
            raise ValueError("extension weights must be nonnegative")
        if self.kind == "undirected" and not np.array_equal(w, w.T):
            raise ValueError("undirected extension weights must be symmetric")
        for u, v in self.required:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"required pair {(u, v)} outside 0..{self.n - 1}")
        _check_overflow(self.n, self.budget)

    @property
    def cap(self) -> int:
        return self.budget + 1

    def degrees(self) -> tuple[np.ndarray, np.ndarray]:
        """(in-degree, out-degree) of the required multigraph."""
        indeg = np.zeros(self.n, dtype=np.int64)
        outdeg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.required:
            outdeg[u] += 1
            indeg[v] += 1
        return indeg, outdeg

    def balance(self) -> np.ndarray:
        indeg, outdeg = self.degrees()
        return indeg - outdeg

    def parity(self) -> np.ndarray:
        indeg, outdeg = self.degrees()
        return (indeg + outdeg) % 2

    def isolated(self) -> list[int]:
        touched = set()
        for u, v in self.required:
            touched.add(u)
            touched.add(v)
        return [v for v in range(self.n) if v not in touched]


@dataclass(frozen=True)
class NormalizedEe:
    """An extension instance ready for the sieve.

    All balances lie in {-1, 0, 1} (directed), the weights are metric and
    capped at budget+1, and every vertex has a companion pair so that an
    optimal extension splits into U->W paths (or O-O paths when undirected).
    ``comp[v]`` is the component index of v; component 0 holds the smallest
    vertex. ``origin[v]`` is the vertex of the source instance that v copies.
    """

    kind: Kind
    n: int
    required: tuple[tuple[int, int], ...]
    weight: np.ndarray
    budget: int
    comp: np.ndarray
    k: int
    U: tuple[int, ...] = ()
    W: tuple[int, ...] = ()
    O: tuple[int, ...] = ()
    origin: tuple[int, ...] = field(default=())

    @property
    def cap(self) -> int:
        return self.budget + 1

    @property
    def sources(self) -> tuple[int, ...]:
        return self.U if self.kind == "directed" else self.O

    @property
    def targets(self) -> tuple[int, ...]:
        return self.W if self.kind == "directed" else self.O

    @property
    def m(self) -> int:
        """Size of a perfect matching of the auxiliary graph."""
        return len(self.U) if self.kind == "directed" else len(self.O) // 2

    def odd_parts(self) -> list[tuple[int, ...]]:
        return [tuple(v for v in self.O if self.comp[v] == i) for i in range(self.k)]


@dataclass(frozen=True)
class CbmInstance:
    """Conjoining matching: a perfect matching of weight <= budget meeting every request.

    ``part[v]`` is the class of v; a request (i, j) is met by a matching edge
    with one end in class i and the other in class j. ``side`` (bipartite
    only) gives 0 for the left side and 1 for the right side.
    """

    kind: Literal["bipartite", "general"]
    n: int
    part: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]
    requests: tuple[tuple[int, int], ...]
    budget: int
    side: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "part", tuple(int(p) for p in self.part))
        object.__setattr__(self, "edges", tuple((int(u), int(v), int(c)) for u, v, c in self.edges))
        object.__setattr__(
            self, "requests", tuple((min(int(i), int(j)), max(int(i), int(j))) for i, j in self.requests)
        )
        if self.side is not None:
            object.__setattr__(self, "side", tuple(int(s) for s in self.side))
        if self.kind not in ("bipartite", "general"):
            raise ValueError(f"unknown matching kind {self.kind!r}")
        if len(self.part) != self.n or any(p < 0 for p in self.part):
            raise ValueError("every vertex needs a nonnegative class")
        if self.budget < 0:
            raise ValueError("budget must be nonnegative")
        if len(set(self.requests)) != len(self.requests):
            raise ValueError("requests must be distinct")
        for u, v, c in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n) or u == v:
                raise ValueError(f"bad edge {(u, v)}")
            if c < 0:
                raise ValueError(f"edge {(u, v)} has negative weight")
        if self.kind == "bipartite":
            if self.side is None or len(self.side) != self.n or set(self.side) - {0, 1}:
                raise ValueError("bipartite instance needs side 0/1 for every vertex")
            for u, v, _ in self.edges:
                if self.side[u] == self.side[v]:
                    raise ValueError(f"edge {(u, v)} joins two vertices on the same side")

    @property
    def cap(self) -> int:
        return self.budget + 1

    def edge_weights(self) -> dict[tuple[int, int], int]:
        """Cheapest edge per unordered vertex pair (parallel edges collapse to the minimum)."""
        best: dict[tuple[int, int], int] = {}
        for u, v, c in self.edges:
            key = (min(u, v), max(u, v))
            if key not in best or c < best[key]:
                best[key] = c
        return best

    def request_index(self, u: int, v: int) -> int:
        """Index of the request met by an edge uv, or -1."""
        key = (min(self.part[u], self.part[v]), max(self.part[u], self.part[v]))
        try:
            return self.requests.index(key)
        except ValueError:
            return -1


# -- helpers -----------------------------------------------------------------


def _check_kind(kind: str) -> None:
    if kind not in ("directed", "undirected"):
        raise ValueError(f"unknown kind {kind!r}")


def _check_overflow(n: int, budget: int) -> None:
    if (budget + 1) * max(n, 1) ** 2 >= MAX_WEIGHT_TOTAL:
        raise ValueError("budget too large for 64-bit weight totals")


def is_connected(n: int, pairs, directed: bool) -> bool:
    """Strong connectivity (directed) or connectivity of all n vertices."""
    if n <= 1:
        return True
    fwd = [[] for _ in range(n)]
    bwd = [[] for _ in range(n)]
    for u, v in pairs:
        fwd[u].append(v)
        bwd[v].append(u)
        if not directed:
            fwd[v].append(u)
            bwd[u].append(v)

    def reach(adj) -> int:
        seen = {0}
        stack = [0]
        while stack:
            for y in adj[stack.pop()]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen)

    return reach(fwd) == n and reach(bwd) == n


def components(n: int, pairs) -> np.ndarray:
    """Weak component index per vertex, numbered by smallest member."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in pairs:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    label: dict[int, int] = {}
    comp = np.empty(n, dtype=np.int64)
    for v in range(n):
        r = find(v)
        if r not in label:
            label[r] = len(label)
        comp[v] = label[r]
    return comp


def is_metric(w: np.ndarray) -> bool:
    """True if w[u, x] <= w[u, v] + w[v, x] for every triple."""
    for v in range(w.shape[0]):
        if (w[:, v : v + 1] + w[v : v + 1, :] < w).any():
            return False
    return True


def shortest_paths(w: np.ndarray, cap: int | None = None) -> np.ndarray:
    """Floyd-Warshall closure of a nonnegative weight matrix, optionally capped."""
    d = np.array(w, dtype=np.int64)
    np.fill_diagonal(d, 0)
    for v in range(d.shape[0]):
        np.minimum(d, d[:, v : v + 1] + d[v : v + 1, :], out=d)
    if cap is not None:
        np.minimum(d, cap, out=d)
    return d


# -- reductions ----------------------------------------------------------------


def rpp_to_ee(inst: RppInstance) -> EeInstance:
    """Extension weights are capped shortest-path weights; unvisited vertices drop out."""
    cap = inst.budget + 1
    w = np.full((inst.n, inst.n), cap, dtype=np.int64)
    for a in inst.arcs:
        w[a.tail, a.head] = min(w[a.tail, a.head], a.weight)
        if inst.kind == "undirected":
            w[a.head, a.tail] = min(w[a.head, a.tail], a.weight)
    w = shortest_paths(w, cap)
    keep = sorted({v for a in inst.arcs if a.required for v in (a.tail, a.head)})
    index = {v: i for i, v in enumerate(keep)}
    required = [(index[a.tail], index[a.head]) for a in inst.arcs if a.required]
    return EeInstance(
        inst.kind, len(keep), tuple(required), w[np.ix_(keep, keep)], inst.budget, tuple(keep)
    )


def ee_to_rpp(inst: EeInstance) -> RppInstance:
    """Required pairs become required arcs; pairs within budget become optional arcs."""
    arcs = [Arc(u, v, int(inst.weight[u, v]), True) for u, v in inst.required]
    for u in range(inst.n):
        lo = u + 1 if inst.kind == "undirected" else 0
        for v in range(lo, inst.n):
            if u != v and inst.weight[u, v] <= inst.budget:
                arcs.append(Arc(u, v, int(inst.weight[u, v]), False))
    return RppInstance(inst.kind, inst.n, tuple(arcs), inst.budget)


def drop_isolated(inst: EeInstance) -> EeInstance:
    """Remove vertices that no required pair touches; they never need visiting."""
    lonely = set(inst.isolated())
    if not lonely:
        return inst
    keep = [v for v in range(inst.n) if v not in lonely]
    index = {v: i for i, v in enumerate(keep)}
    return EeInstance(
        inst.kind,
        len(keep),
        tuple((index[u], index[v]) for u, v in inst.required),
        inst.weight[np.ix_(keep, keep)],
        inst.budget,
        tuple(inst.labels[v] for v in keep),
    )


def _with_copies(inst: EeInstance, origin: list[int], required) -> EeInstance:
    """New instance whose vertex v copies ``origin[v]``; copies of one vertex are 0 apart."""
    o = np.asarray(origin, dtype=np.int64)
    w = inst.weight[np.ix_(o, o)].copy()
    w[o[:, None] == o[None, :]] = 0
    return EeInstance(
        inst.kind, len(origin), tuple(required), w, inst.budget, tuple(inst.labels[v] for v in origin)
    )


def normalize_balances(inst: EeInstance) -> EeInstance:
    """Split vertices until every balance is -1, 0 or +1.

    A vertex v of balance b > 1 gains b-1 companions v' each joined by a
    required arc v->v'; for b < -1 the arcs run v'->v. Companions copy v's
    weights and sit at distance 0 from v.
    """
    if inst.kind != "directed":
        raise ValueError("balance normalization applies to directed instances")
    bal = inst.balance()
    origin = list(range(inst.n))
    required = list(inst.required)
    for v in range(inst.n):
        extra = abs(int(bal[v])) - 1
        for _ in range(max(extra, 0)):
            c = len(origin)
            origin.append(v)
            required.append((v, c) if bal[v] > 0 else (c, v))
    if len(origin) == inst.n:
        return inst
    return _with_copies(inst, origin, required)


def metric_close(inst: EeInstance) -> EeInstance:
    """Replace weights by shortest-path weights, capped at budget+1."""
    w = shortest_paths(inst.weight, inst.budget + 1)
    return replace(inst, weight=w)


def no_cycles_transform(inst: EeInstance) -> EeInstance:
    """Give every vertex v two companions v', v'' at distance 0.

    Directed: required arcs vv', v'v, vv'', v''v, v'v'' make v' a balance -1
    vertex and v'' a balance +1 vertex. Undirected: required edges vv', vv''
    make both companions odd. Either way a cycle of an optimal extension
    through v can be rerouted as a path between the companions.
    """
    n = inst.n
    origin = list(range(n)) + list(range(n)) + list(range(n))
    required = list(inst.required)
    for v in range(n):
        p, pp = n + v, 2 * n + v
        if inst.kind == "directed":
            required += [(v, p), (p, v), (v, pp), (pp, v), (p, pp)]
        else:
            required += [(v, p), (v, pp)]
    return _with_copies(inst, origin, required)


def analyze_components(inst: EeInstance, origin=None) -> NormalizedEe:
    """Label components and extract the imbalanced (or odd) vertices."""
    comp = components(inst.n, inst.required)
    k = int(comp.max()) + 1 if inst.n else 0
    origin = tuple(inst.labels if origin is None else origin)
    if inst.kind == "directed":
        bal = inst.balance()
        if np.abs(bal).max(initial=0) > 1:
            raise ValueError("balances outside {-1, 0, 1}; normalize first")
        U = tuple(int(v) for v in np.flatnonzero(bal == 1))
        W = tuple(int(v) for v in np.flatnonzero(bal == -1))
        if len(U) != len(W):
            raise AssertionError("imbalanced vertex sets differ in size")
        O: tuple[int, ...] = ()
    else:
        U = W = ()
        O = tuple(int(v) for v in np.flatnonzero(inst.parity() == 1))
        for i in range(k):
            if sum(1 for v in O if comp[v] == i) % 2:
                raise AssertionError(f"component {i} has an odd number of odd vertices")
    w = inst.weight
    n = inst.n
    if not is_metric(w):
        raise ValueError("weights violate the triangle inequality; close them first")
    comp.setflags(write=False)
    return NormalizedEe(inst.kind, n, inst.required, w, inst.budget, comp, k, U, W, O, origin)


def normalize(inst: EeInstance) -> NormalizedEe:
    """Full pipeline from an extension instance to the sieve-ready form.

    ``origin`` in the result refers to the vertices of ``inst``.
    """
    base = drop_isolated(inst)
    base = replace(base, labels=tuple(range(base.n)))
    kept = [v for v in range(inst.n) if v not in set(inst.isolated())]
    cur = base
    if cur.kind == "directed":
        cur = normalize_balances(cur)
    cur = metric_close(cur)
    cur = no_cycles_transform(cur)
    origin = tuple(kept[v] for v in cur.labels)
    return analyze_components(cur, origin)

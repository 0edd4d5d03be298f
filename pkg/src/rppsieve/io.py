"""Line-oriented text format for instances.

::

    kind drpp|urpp|ee|uee|cbm|cgm
    vertices <n>             # vertices are 1..n
    budget <l>
    arc <u> <v> <w> <0|1>    # drpp/urpp: weight w, required flag
    req <u> <v>              # ee/uee: required arc/edge
    w <u> <v> <c>            # ee/uee: extension weight; unlisted pairs default to l+1
    part <v> <i>             # cbm/cgm: vertex v belongs to class i (1-based)
    edge <u> <v> <c>         # cbm/cgm: weighted edge
    conjoin <i> <j>          # cbm/cgm: request ij
    side <v> <L|R>           # cbm only

``kind`` must come first. :func:`serialize` writes the canonical form, which
:func:`parse` reads back exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .instances import Arc, CbmInstance, EeInstance, RppInstance

Instance = RppInstance | EeInstance | CbmInstance

KINDS = {
    "drpp": ("rpp", "directed"),
    "urpp": ("rpp", "undirected"),
    "ee": ("ee", "directed"),
    "uee": ("ee", "undirected"),
    "cbm": ("cbm", "bipartite"),
    "cgm": ("cbm", "general"),
}

# keyword -> (allowed families, argument count)
_RECORDS = {
    "arc": ({"rpp"}, 4),
    "req": ({"ee"}, 2),
    "w": ({"ee"}, 3),
    "part": ({"cbm"}, 2),
    "edge": ({"cbm"}, 3),
    "conjoin": ({"cbm"}, 2),
    "side": ({"cbm"}, 2),
}


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def kind_name(inst: Instance) -> str:
    if isinstance(inst, RppInstance):
        return "drpp" if inst.kind == "directed" else "urpp"
    if isinstance(inst, EeInstance):
        return "ee" if inst.kind == "directed" else "uee"
    return "cbm" if inst.kind == "bipartite" else "cgm"


def _int(tok: str, lineno: int, what: str, lo: int = 0) -> int:
    try:
        val = int(tok)
    except ValueError:
        raise ParseError(lineno, f"{what} must be an integer, got {tok!r}") from None
    if val < lo:
        raise ParseError(lineno, f"{what} must be >= {lo}, got {val}")
    return val


def parse(text: str) -> Instance:
    kind = None
    n = budget = None
    records: list[tuple[int, str, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        key, args = toks[0], toks[1:]
        if kind is None:
            if key != "kind":
                raise ParseError(lineno, "the first record must be 'kind'")
            if len(args) != 1 or args[0] not in KINDS:
                raise ParseError(lineno, f"unknown kind {' '.join(args)!r}")
            kind = args[0]
            continue
        if key in ("vertices", "budget"):
            if len(args) != 1:
                raise ParseError(lineno, f"'{key}' takes one value")
            if (n if key == "vertices" else budget) is not None:
                raise ParseError(lineno, f"duplicate '{key}'")
            val = _int(args[0], lineno, key)
            if key == "vertices":
                n = val
            else:
                budget = val
            continue
        if key == "kind":
            raise ParseError(lineno, "duplicate 'kind'")
        if key not in _RECORDS:
            raise ParseError(lineno, f"unknown record {key!r}")
        families, arity = _RECORDS[key]
        family = KINDS[kind][0]
        if family not in families or (key == "side" and kind != "cbm"):
            raise ParseError(lineno, f"record {key!r} is not allowed in a {kind} file")
        if len(args) != arity:
            raise ParseError(lineno, f"'{key}' takes {arity} values, got {len(args)}")
        if n is None or budget is None:
            raise ParseError(lineno, "'vertices' and 'budget' must precede other records")
        records.append((lineno, key, args))
    if kind is None:
        raise ParseError(0, "empty file")
    if n is None or budget is None:
        raise ParseError(0, "missing 'vertices' or 'budget'")

    def vertex(tok, lineno):
        v = _int(tok, lineno, "vertex", lo=1)
        if v > n:
            raise ParseError(lineno, f"vertex {v} exceeds vertex count {n}")
        return v - 1

    family, sub = KINDS[kind]
    try:
        if family == "rpp":
            arcs = []
            for lineno, _, a in records:
                flag = _int(a[3], lineno, "required flag")
                if flag > 1:
                    raise ParseError(lineno, "required flag must be 0 or 1")
                arcs.append(
                    Arc(vertex(a[0], lineno), vertex(a[1], lineno), _int(a[2], lineno, "weight"), bool(flag))
                )
            return RppInstance(sub, n, tuple(arcs), budget)

        if family == "ee":
            w = np.full((n, n), budget + 1, dtype=np.int64)
            seen: set[tuple[int, int]] = set()
            required = []
            for lineno, key, a in records:
                u, v = vertex(a[0], lineno), vertex(a[1], lineno)
                if key == "req":
                    required.append((u, v))
                    continue
                if u == v:
                    raise ParseError(lineno, "extension weight on the diagonal")
                pair = (min(u, v), max(u, v)) if sub == "undirected" else (u, v)
                if pair in seen:
                    raise ParseError(lineno, f"duplicate weight for pair {a[0]} {a[1]}")
                seen.add(pair)
                c = _int(a[2], lineno, "weight")
                w[u, v] = c
                if sub == "undirected":
                    w[v, u] = c
            return EeInstance(sub, n, tuple(required), w, budget)

        part: list[int | None] = [None] * n
        side: list[int | None] = [None] * n
        edges, requests = [], []
        for lineno, key, a in records:
            if key == "part":
                v = vertex(a[0], lineno)
                if part[v] is not None:
                    raise ParseError(lineno, f"vertex {a[0]} already has a class")
                part[v] = _int(a[1], lineno, "class", lo=1) - 1
            elif key == "side":
                v = vertex(a[0], lineno)
                if a[1] not in ("L", "R"):
                    raise ParseError(lineno, "side must be L or R")
                if side[v] is not None:
                    raise ParseError(lineno, f"vertex {a[0]} already has a side")
                side[v] = 0 if a[1] == "L" else 1
            elif key == "edge":
                edges.append((vertex(a[0], lineno), vertex(a[1], lineno), _int(a[2], lineno, "weight")))
            else:
                requests.append((_int(a[0], lineno, "class", lo=1) - 1, _int(a[1], lineno, "class", lo=1) - 1))
        if any(p is None for p in part):
            raise ParseError(0, "every vertex needs a 'part' record")
        if sub == "bipartite" and any(s is None for s in side):
            raise ParseError(0, "every vertex of a cbm instance needs a 'side' record")
        return CbmInstance(
            sub, n, tuple(part), tuple(edges), tuple(requests), budget,
            tuple(side) if sub == "bipartite" else None,
        )
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(0, str(exc)) from None


def serialize(inst: Instance) -> str:
    name = kind_name(inst)
    lines = [f"kind {name}", f"vertices {inst.n}", f"budget {inst.budget}"]
    if isinstance(inst, RppInstance):
        lines += [f"arc {a.tail + 1} {a.head + 1} {a.weight} {int(a.required)}" for a in inst.arcs]
    elif isinstance(inst, EeInstance):
        lines += [f"req {u + 1} {v + 1}" for u, v in inst.required]
        cap = inst.budget + 1
        for u in range(inst.n):
            lo = u + 1 if inst.kind == "undirected" else 0
            for v in range(lo, inst.n):
                if u != v and inst.weight[u, v] != cap:
                    lines.append(f"w {u + 1} {v + 1} {inst.weight[u, v]}")
    else:
        lines += [f"part {v + 1} {p + 1}" for v, p in enumerate(inst.part)]
        if inst.kind == "bipartite":
            lines += [f"side {v + 1} {'LR'[s]}" for v, s in enumerate(inst.side)]
        lines += [f"edge {u + 1} {v + 1} {c}" for u, v, c in inst.edges]
        lines += [f"conjoin {i + 1} {j + 1}" for i, j in inst.requests]
    return "\n".join(lines) + "\n"


def load(path) -> Instance:
    return parse(Path(path).read_text(encoding="utf-8"))


def save(inst: Instance, path) -> None:
    Path(path).write_text(serialize(inst), encoding="utf-8")

"""Command line: solve, gen, oracle, bench, selftest.

``solve`` prints one line::

    answer=YES|NO min_weight=<i|-> error_bound=2^-x k=<k> seed=<s>

and exits 0 on YES, 1 on NO, 2 on any error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import statistics
import sys
import time
from pathlib import Path

from . import oracle
from .driver import DriverConfig, Verdict, solve
from .field import SUPPORTED_BITS
from .generate import GenConfig, MatchingGenConfig, random_cbm, random_ee, random_rpp
from .instances import CbmInstance, EeInstance, RppInstance, normalize, rpp_to_ee
from .io import ParseError, kind_name, parse, serialize

STAGES = ("reduce", "path_dp", "zeta", "sieve", "interpolate")
# generated instances count as oracle-compatible up to this matching size
ORACLE_MAX_M = 8
BENCH_COLUMNS = ("sweep", "k", "n", "m", "L+1", "budget", "seed", *STAGES, "total", "answer")


def _driver_config(args) -> DriverConfig:
    return DriverConfig(field_bits=args.field_bits, reps=args.reps, seed=args.seed, threads=args.threads)


def oracle_optimum(inst) -> int | None:
    """Exact optimum (uncapped for rural postman, capped weights otherwise) via the oracles."""
    if isinstance(inst, RppInstance):
        return oracle.rpp_walk_optimum(inst)
    if isinstance(inst, EeInstance):
        return oracle.ee_walk_optimum(inst)
    if inst.kind == "bipartite":
        return oracle.brute_force_cbm(inst)
    return oracle.brute_force_cgm(inst)


def matching_oracle(inst) -> int | None:
    """Optimum from the explicit matching graph (extension instances only)."""
    if isinstance(inst, RppInstance):
        return oracle.brute_force_ee(normalize(rpp_to_ee(inst)))
    if isinstance(inst, EeInstance):
        return oracle.brute_force_ee(normalize(inst))
    return None


def _fmt_opt(opt: int | None, budget: int) -> str:
    opt = oracle.cap_optimum(opt, budget)
    return "-" if opt is None else str(opt)


def cmd_solve(args) -> int:
    text = Path(args.file).read_text(encoding="utf-8")
    inst = parse(text)
    verdict = solve(inst, _driver_config(args))
    print(verdict.summary())
    if args.verbose:
        digest = hashlib.sha256(text.encode()).hexdigest()[:16]
        print(f"instance={digest} kind={kind_name(inst)} m={verdict.m} L={verdict.L} r={verdict.r} t={verdict.reps}")
        for stage in STAGES:
            print(f"time_{stage}={verdict.timings.get(stage, 0.0):.4f}")
    if args.oracle:
        opt = _fmt_opt(oracle_optimum(inst), inst.budget)
        got = "-" if verdict.min_weight is None else str(verdict.min_weight)
        print(f"oracle_min_weight={opt} agree={'yes' if opt == got else 'no'}")
        if opt != got:
            print("error: oracle and sieve disagree", file=sys.stderr)
            return 2
    return 0 if verdict.answer else 1


def _oracle_compatible(inst) -> bool:
    try:
        if isinstance(inst, CbmInstance):
            oracle_optimum(inst)
            return True
        ne = normalize(rpp_to_ee(inst)) if isinstance(inst, RppInstance) else normalize(inst)
        return ne.m <= ORACLE_MAX_M and len(inst.required) <= oracle.MAX_WALK_REQUIRED
    except oracle.OracleSizeError:
        return False


def generate(args, seed):
    if args.kind in ("cbm", "cgm"):
        cfg = MatchingGenConfig(
            side=args.side, classes=args.classes, requests=args.requests, density=args.density,
            min_weight=args.min_weight, max_weight=args.max_weight, budget=args.budget,
        )
        return random_cbm(cfg, seed, bipartite=args.kind == "cbm")
    cfg = GenConfig(
        n=args.n, k=args.k, min_weight=args.min_weight, max_weight=args.max_weight, density=args.density,
        budget=args.budget, required_vertices=args.required_vertices,
    )
    directed = args.kind in ("drpp", "ee")
    if args.kind in ("drpp", "urpp"):
        return random_rpp(cfg, seed, directed)
    return random_ee(cfg, seed, directed)


def cmd_gen(args) -> int:
    inst = generate(args, args.seed)
    attempt = 0
    while args.oracle_compatible and not _oracle_compatible(inst):
        attempt += 1
        if attempt > 100:
            print("error: could not generate an oracle-compatible instance", file=sys.stderr)
            return 2
        inst = generate(args, [args.seed, attempt])
    text = serialize(inst)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def compare(inst, cfg: DriverConfig) -> tuple[bool, str]:
    """Run sieve and oracles; returns (agree, report line)."""
    verdict = solve(inst, cfg)
    got = "-" if verdict.min_weight is None else str(verdict.min_weight)
    walk = _fmt_opt(oracle_optimum(inst), inst.budget)
    fields = [f"sieve={got}", f"oracle={walk}"]
    agree = got == walk
    if not isinstance(inst, CbmInstance):
        match = _fmt_opt(matching_oracle(inst), inst.budget)
        fields.append(f"matching={match}")
        agree = agree and match == got
    return agree, " ".join(fields)


def cmd_oracle(args) -> int:
    cfg = _driver_config(args)
    if args.fuzz:
        mismatches = checked = 0
        for i in range(args.fuzz):
            args.budget = None
            inst = generate(args, [args.seed, i])
            if not _oracle_compatible(inst):
                continue
            checked += 1
            ok, line = compare(inst, cfg)
            if not ok:
                mismatches += 1
                print(f"mismatch seed=[{args.seed},{i}] {line}")
        print(f"instances={args.fuzz} checked={checked} mismatches={mismatches}")
        return 0 if mismatches == 0 else 1
    if not args.file:
        print("error: give an instance file or --fuzz N", file=sys.stderr)
        return 2
    inst = parse(Path(args.file).read_text(encoding="utf-8"))
    try:
        ok, line = compare(inst, cfg)
    except oracle.OracleSizeError as exc:
        print(f"error: instance too large for the oracle: {exc}", file=sys.stderr)
        return 2
    print(f"{line} mismatches={0 if ok else 1}")
    return 0 if ok else 1


def bench_instance(n: int, k: int, budget: int, seed, required_fraction: float = 0.6) -> RppInstance:
    """Directed benchmark instance: k required routes over about 60% of n vertices.

    Each route is a directed path and the routes have equal length, so the
    sieve size depends on n and k only and the sweep isolates the growth in k.
    """
    used = max(k, int(round(required_fraction * n)))
    cfg = GenConfig(
        n=n, k=k, min_weight=1, max_weight=5, density=0.2, budget=budget, required_vertices=used, routes=True,
        even_split=True,
    )
    return random_rpp(cfg, seed, directed=True)


def run_bench(points, budget: int, reps: int, cfg: DriverConfig, seed: int, writer=None, sweep="k"):
    rows = []
    # compile or load the kernels before anything is timed
    solve(bench_instance(6, 2, 2, seed), DriverConfig(field_bits=cfg.field_bits, reps=1))
    for k, n in points:
        for rep in range(reps):
            inst = bench_instance(n, k, budget, [seed, k, n, rep])
            t0 = time.perf_counter()
            verdict: Verdict = solve(inst, cfg)
            total = time.perf_counter() - t0
            row = {
                "sweep": sweep, "k": verdict.k, "n": n, "m": verdict.m, "L+1": verdict.L + 1,
                "budget": budget, "seed": f"{seed}:{k}:{n}:{rep}",
                **{s: round(verdict.timings.get(s, 0.0), 4) for s in STAGES},
                "total": round(total, 4), "answer": "YES" if verdict.answer else "NO",
            }
            rows.append(row)
            if writer is not None:
                writer.writerow(row)
    return rows


def median_ratios(rows, key: str) -> list[tuple[int, int, float]]:
    """Median total time per ``key`` value and the ratio between consecutive values."""
    by: dict[int, list[float]] = {}
    for r in rows:
        by.setdefault(int(r[key]), []).append(float(r["total"]))
    keys = sorted(by)
    med = {x: statistics.median(by[x]) for x in keys}
    return [(a, b, med[b] / med[a]) for a, b in zip(keys, keys[1:])]


def cmd_bench(args) -> int:
    cfg = _driver_config(args)
    if args.sweep == "k":
        points = [(k, args.n) for k in range(args.k_min, args.k_max + 1)]
    else:
        points = [(args.k, n) for n in args.n_values]
    out = open(args.csv, "w", newline="", buffering=1) if args.csv else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        rows = run_bench(points, args.budget, args.bench_reps, cfg, args.seed, writer, args.sweep)
    finally:
        if args.csv:
            out.close()
    key = "k" if args.sweep == "k" else "n"
    for a, b, ratio in median_ratios(rows, key):
        print(f"# {key} {a}->{b}: median time ratio {ratio:.2f}", file=sys.stderr)
    return 0


def cmd_selftest(args) -> int:
    """Quick end-to-end agreement check on a few random instances of each kind."""
    cfg = DriverConfig(field_bits=args.field_bits, reps=1, seed=args.seed)
    failures = 0
    for kind in ("drpp", "urpp", "ee", "uee", "cbm", "cgm"):
        ns = argparse.Namespace(
            kind=kind, n=6, k=2, min_weight=1, max_weight=4, density=0.3, budget=None, required_vertices=5,
            side=3, classes=3, requests=2,
        )
        before = failures
        for i in range(args.count):
            inst = generate(ns, [args.seed, i])
            if not _oracle_compatible(inst):
                continue
            ok, line = compare(inst, cfg)
            if not ok:
                failures += 1
                print(f"FAIL {kind} seed=[{args.seed},{i}] {line}")
        print(f"{kind}: {'ok' if failures == before else 'FAILED'}")
    print(f"selftest failures={failures}")
    return 0 if failures == 0 else 1


def _add_driver_flags(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--field-bits", type=int, choices=SUPPORTED_BITS, default=64)
    p.add_argument("--reps", type=int, default=2, help="independent rounds (default 2)")
    p.add_argument("--threads", type=int, default=1)


def _add_gen_flags(p):
    p.add_argument("--kind", choices=("drpp", "urpp", "ee", "uee", "cbm", "cgm"), default="drpp")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--min-weight", type=int, default=1)
    p.add_argument("--max-weight", type=int, default=5)
    p.add_argument("--density", type=float, default=0.3)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--required-vertices", type=int, default=None)
    p.add_argument("--side", type=int, default=4, help="cbm/cgm: vertices per side")
    p.add_argument("--classes", type=int, default=3, help="cbm/cgm: number of classes")
    p.add_argument("--requests", type=int, default=2, help="cbm/cgm: number of requests")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rppsieve", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decide an instance file")
    p.add_argument("file")
    _add_driver_flags(p)
    p.add_argument("--verbose", action="store_true")
    p.add_argument("--oracle", action="store_true", help="also run the brute-force oracle and compare")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="write a random instance")
    _add_gen_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle-compatible", action="store_true", help="resample until the oracles can solve it")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", help="compare sieve and oracle on a file or a fuzz run")
    p.add_argument("file", nargs="?")
    p.add_argument("--fuzz", type=int, default=0, help="number of random instances instead of a file")
    _add_gen_flags(p)
    _add_driver_flags(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="timing sweep over k or n (CSV)")
    p.add_argument("--sweep", choices=("k", "n"), default="k")
    p.add_argument("--k-min", type=int, default=6)
    p.add_argument("--k-max", type=int, default=11)
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--n", type=int, default=40)
    p.add_argument("--n-values", type=int, nargs="+", default=[20, 40])
    p.add_argument("--budget", type=int, default=40)
    p.add_argument("--bench-reps", type=int, default=1, help="instances per sweep point")
    p.add_argument("--csv")
    _add_driver_flags(p)
    p.set_defaults(func=cmd_bench, reps=1)

    p = sub.add_parser("selftest", help="quick agreement check against the oracles")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--field-bits", type=int, choices=SUPPORTED_BITS, default=64)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

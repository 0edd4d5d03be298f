"""Timing sweep over the number of required components k and the graph size n.

Writes one CSV row per solved instance (same columns as ``rppsieve bench``)
and prints the median time ratio between consecutive sweep points.

    python3 scripts/scaling_sweep.py --out results/scaling.csv
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from rppsieve.cli import BENCH_COLUMNS, median_ratios, run_bench
from rppsieve.driver import DriverConfig


@dataclass(frozen=True)
class SweepConfig:
    n: int = 40
    budget: int = 40
    k_values: tuple[int, ...] = (6, 7, 8, 9, 10, 11)
    n_values: tuple[int, ...] = (20, 40)
    n_sweep_k: int = 6
    instances: int = 1
    seed: int = 0
    driver: DriverConfig = field(default_factory=lambda: DriverConfig(reps=1))


def run(cfg: SweepConfig, out: Path | None) -> dict:
    stream = open(out, "w", newline="", buffering=1) if out else sys.stdout
    try:
        writer = csv.DictWriter(stream, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        t0 = time.perf_counter()
        k_rows = run_bench([(k, cfg.n) for k in cfg.k_values], cfg.budget, cfg.instances, cfg.driver, cfg.seed, writer, "k")
        n_rows = run_bench(
            [(cfg.n_sweep_k, n) for n in cfg.n_values], cfg.budget, cfg.instances, cfg.driver, cfg.seed, writer, "n"
        )
        elapsed = time.perf_counter() - t0
    finally:
        if out:
            stream.close()
    return {"k": median_ratios(k_rows, "k"), "n": median_ratios(n_rows, "n"), "seconds": elapsed}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path)
    ap.add_argument("--k-max", type=int, default=11)
    ap.add_argument("--instances", type=int, default=1, help="instances per sweep point")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
    cfg = SweepConfig(k_values=tuple(range(6, args.k_max + 1)), instances=args.instances, seed=args.seed)
    res = run(cfg, args.out)
    for key in ("k", "n"):
        for a, b, ratio in res[key]:
            print(f"{key} {a}->{b}: median time ratio {ratio:.2f}", file=sys.stderr)
    print(f"sweep time {res['seconds']:.0f} s", file=sys.stderr)


if __name__ == "__main__":
    main()

"""Fuzz the sieve against the exhaustive oracles on random small instances.

    python3 scripts/oracle_fuzz.py --count 500 --kinds drpp urpp cbm cgm
"""

from __future__ import annotations

import argparse
import time
from collections import Counter
from dataclasses import dataclass

import numpy as np

from rppsieve.driver import DriverConfig, solve
from rppsieve.generate import GenConfig, MatchingGenConfig, random_cbm, random_rpp
from rppsieve.instances import normalize, rpp_to_ee
from rppsieve.oracle import brute_force_cbm, brute_force_cgm, brute_force_ee, cap_optimum, rpp_walk_optimum


@dataclass(frozen=True)
class FuzzConfig:
    count: int = 200
    max_n: int = 8
    max_k: int = 3
    max_budget: int = 12
    max_side: int = 5
    max_m: int = 10
    seed: int = 0


def rpp_case(cfg: FuzzConfig, seed, directed: bool):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, cfg.max_k + 1))
    used = int(rng.integers(k, min(cfg.max_n, 6) + 1))
    gen = GenConfig(
        n=int(rng.integers(used, cfg.max_n + 1)), k=k, required_vertices=used,
        budget=int(rng.integers(0, cfg.max_budget + 1)),
    )
    inst = random_rpp(gen, seed, directed)
    ne = normalize(rpp_to_ee(inst))
    if ne.m > cfg.max_m:
        return None
    expect = cap_optimum(brute_force_ee(ne), inst.budget)
    walk = cap_optimum(rpp_walk_optimum(inst), inst.budget)
    if walk != expect:
        raise AssertionError(f"oracles disagree on seed {seed}: walk {walk}, matching {expect}")
    return inst, expect


def matching_case(cfg: FuzzConfig, seed, bipartite: bool):
    rng = np.random.default_rng(seed)
    gen = MatchingGenConfig(
        side=int(rng.integers(1, cfg.max_side + 1)), classes=int(rng.integers(2, 5)),
        requests=int(rng.integers(0, 4)), budget=int(rng.integers(0, 11)),
    )
    inst = random_cbm(gen, seed, bipartite)
    opt = brute_force_cbm(inst) if bipartite else brute_force_cgm(inst)
    return inst, cap_optimum(opt, inst.budget)


def run(cfg: FuzzConfig, kinds) -> Counter:
    driver = DriverConfig(reps=1, seed=cfg.seed)
    stats: Counter = Counter()
    for kind in kinds:
        for i in range(cfg.count):
            seed = [cfg.seed, i]
            if kind in ("drpp", "urpp"):
                case = rpp_case(cfg, seed, kind == "drpp")
            else:
                case = matching_case(cfg, seed, kind == "cbm")
            if case is None:
                stats[f"{kind} skipped"] += 1
                continue
            inst, expect = case
            got = solve(inst, driver).min_weight
            stats[f"{kind} checked"] += 1
            if got != expect:
                stats[f"{kind} mismatches"] += 1
                print(f"mismatch {kind} seed={seed} sieve={got} oracle={expect}")
    return stats


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--kinds", nargs="+", default=["drpp", "urpp", "cbm", "cgm"])
    args = ap.parse_args()
    t0 = time.perf_counter()
    stats = run(FuzzConfig(count=args.count, seed=args.seed), args.kinds)
    for key in sorted(stats):
        print(f"{key}: {stats[key]}")
    print(f"time {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Head-to-head query-count sweep: baseline vs Las Vegas vs Monte Carlo on
planted instances with informative side information.

Writes reports.csv / reports.json / reports.svg (queries vs n with the
lower-bound curve) under --out and prints a medians table.

Usage: python scripts/savings_sweep.py [--trials 20] [--out out/savings]
"""

import argparse
from pathlib import Path

from oclust.harness import ExperimentConfig, emit, run_experiment


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ns", type=int, nargs="+", default=[500, 1000, 2000])
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--fplus", default="0:0.1,1:0.9")
    ap.add_argument("--fminus", default="0:0.9,1:0.1")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--scale", type=float, default=0.01)
    ap.add_argument("--base-seed", type=int, default=7)
    ap.add_argument("--out", type=Path, default=Path("out/savings"))
    args = ap.parse_args()

    config = ExperimentConfig.from_dict(
        {
            "ns": args.ns,
            "ks": [args.k],
            "dists": [[args.fplus, args.fminus]],
            "algos": ["baseline", "lv", "mc"],
            "trials": args.trials,
            "base_seed": args.base_seed,
            "constants": {"scale": args.scale},
        }
    )
    reports, aggregates = run_experiment(config)
    written = emit(reports, args.out, aggregates=aggregates)

    print(f"# {args.trials} trials/cell, scale={args.scale}, k={args.k}")
    print(f"{'algo':>10} {'n':>6} {'median_q':>10} {'success':>8} {'lb':>10}")
    medians = {}
    for row in aggregates:
        medians[(row["algo"], row["n"])] = row["median_queries"]
        print(
            f"{row['algo']:>10} {row['n']:>6} {row['median_queries']:>10.0f} "
            f"{row['success_rate']:>8.2f} {row['lb_queries']:>10.0f}"
        )
    for n in args.ns:
        bl = medians.get(("baseline", n))
        if not bl:
            continue
        parts = [
            f"{algo}/baseline={medians[(algo, n)] / bl:.3f}"
            for algo in ("lv", "mc")
            if (algo, n) in medians
        ]
        print(f"n={n}: " + "  ".join(parts))
    for kind, path in sorted(written.items()):
        print(f"{kind}: {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

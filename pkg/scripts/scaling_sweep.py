#!/usr/bin/env python3
"""Monte Carlo query growth in n at fixed k: with informative side
information the count should track log n, far below the linear growth of the
query-only baseline.

Usage: python scripts/scaling_sweep.py [--trials 30] [--out out/scaling]
"""

import argparse
from pathlib import Path

from oclust.harness import ExperimentConfig, emit, run_experiment


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ns", type=int, nargs="+", default=[500, 1000, 2000, 4000])
    ap.add_argument("--k", type=int, default=5)
    ap.add_argument("--fplus", default="0:0.1,1:0.9")
    ap.add_argument("--fminus", default="0:0.9,1:0.1")
    ap.add_argument("--trials", type=int, default=30)
    ap.add_argument("--scale", type=float, default=0.02)
    ap.add_argument("--base-seed", type=int, default=11)
    ap.add_argument("--out", type=Path, default=Path("out/scaling"))
    args = ap.parse_args()

    config = ExperimentConfig.from_dict(
        {
            "ns": args.ns,
            "ks": [args.k],
            "dists": [[args.fplus, args.fminus]],
            "algos": ["mc"],
            "trials": args.trials,
            "base_seed": args.base_seed,
            "constants": {"scale": args.scale},
        }
    )
    reports, aggregates = run_experiment(config)
    written = emit(reports, args.out, aggregates=aggregates)

    print(f"# mc only, {args.trials} trials/cell, scale={args.scale}, k={args.k}")
    rows = {row["n"]: row for row in aggregates}
    n0 = min(rows)
    print(f"{'n':>6} {'median_q':>10} {'vs n={}'.format(n0):>10} {'success':>8}")
    for n in sorted(rows):
        row = rows[n]
        rel = row["median_queries"] / rows[n0]["median_queries"]
        print(
            f"{n:>6} {row['median_queries']:>10.0f} {rel:>10.2f} "
            f"{row['success_rate']:>8.2f}"
        )
    for kind, path in sorted(written.items()):
        print(f"{kind}: {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

#!/usr/bin/env python3
"""Zero-query error floors over the sparse block-model regime: f_plus =
Bern(a' log n / n) vs f_minus = Bern(b' log n / n), for both Fano forms in
exact and approximate modes.

Exploratory sweep only; no recovery-threshold claim is checked here.

Usage: python scripts/sparse_sbm_bounds.py [--n 1000000] [--k 20]
"""

import argparse
import math

from oclust.bounds import fano_zero_query_hellinger, fano_zero_query_kl
from oclust.divergence import bernoulli


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10**6)
    ap.add_argument("--k", type=int, default=20)
    ap.add_argument("--b-prime", type=float, default=1.0)
    ap.add_argument(
        "--a-primes", type=float, nargs="+",
        default=[1.5, 2.0, 3.0, 4.0, 6.0, 9.0, 16.0, 25.0, 40.0],
    )
    args = ap.parse_args()

    n, k, bp = args.n, args.k, args.b_prime
    fm = bernoulli(bp * math.log(n) / n)
    print(f"# n={n} k={k} b'={bp}")
    print(
        f"{'a_prime':>8} {'gap':>8} {'kl_exact':>9} {'kl_apx':>8} "
        f"{'hel_exact':>10} {'hel_apx':>8}"
    )
    for ap_ in args.a_primes:
        fp = bernoulli(ap_ * math.log(n) / n)
        gap = math.sqrt(ap_) - math.sqrt(bp)  # vs sqrt(k/2) in the bound
        print(
            f"{ap_:>8.2f} {gap:>8.3f} "
            f"{fano_zero_query_kl(n, k, fp, fm):>9.4f} "
            f"{fano_zero_query_kl(n, k, fp, fm, mode='approx'):>8.4f} "
            f"{fano_zero_query_hellinger(n, k, fp, fm):>10.4f} "
            f"{fano_zero_query_hellinger(n, k, fp, fm, mode='approx'):>8.4f}"
        )
    print(f"# positive bounds persist while sqrt(a')-sqrt(b') < sqrt(k/2)={math.sqrt(k / 2):.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

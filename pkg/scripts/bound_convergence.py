"""Tabulate b_k and the central-binomial k-th root against their limits.

    python scripts/bound_convergence.py --k-max 1000001 > bound.csv
"""
import argparse
import csv
import sys

from perclab.bound import LIMIT, binom_kth_root_limit_check, bound_at, geometric_ks


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k-max", type=int, default=10**6 + 1)
    ap.add_argument("--per-decade", type=int, default=8)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["k", "mid", "b_k", "threshold", "abs_err_vs_limit", "kth_root", "even_k_b"])
    for k in geometric_ks(args.k_max, args.per_decade, odd=True):
        pt = bound_at(k)
        even = bound_at(k + 1).b_k
        w.writerow([k, pt.mid, f"{pt.b_k:.17g}", f"{pt.threshold:.17g}",
                    f"{abs(pt.b_k - LIMIT):.6e}", f"{binom_kth_root_limit_check(k):.17g}",
                    f"{even:.17g}"])


if __name__ == "__main__":
    main()

"""Coupled one-arm / two-arm sweep over radii, written as CSV for plotting.

    python scripts/finite_size_sweep.py --k-list 16,32,64,128 > sweep.csv
"""
import argparse
import csv
import sys

import numpy as np

from perclab.lattice import LatticeVariant
from perclab.sim import Event, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--variant", default="tri-up")
    ap.add_argument("--k-list", default="16,32,64")
    ap.add_argument("--p-min", type=float, default=0.30)
    ap.add_argument("--p-max", type=float, default=0.70)
    ap.add_argument("--points", type=int, default=41)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=20240601)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    variant = LatticeVariant.parse(args.variant)
    ks = [int(k) for k in args.k_list.split(",")]
    grid = np.round(np.linspace(args.p_min, args.p_max, args.points), 6)
    w = None
    for event in Event:
        for row in sweep(variant, ks, grid, args.trials, args.seed, event, threads=args.threads):
            rec = row.record()
            if w is None:
                w = csv.DictWriter(sys.stdout, fieldnames=list(rec), lineterminator="\n")
                w.writeheader()
            w.writerow(rec)


if __name__ == "__main__":
    main()

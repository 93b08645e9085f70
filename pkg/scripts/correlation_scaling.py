#!/usr/bin/env python3
"""Pair and triple correlations of dilated squares against their limits.

Draws random 256-bit dilations and prints R2(box[-1,1]) / 2L and
R3(box[-1,1]^2) / 4L^2 across a range of N, so the approach to the
uniform limit is visible as the ratios settle near 1.
"""

import argparse

import numpy as np

from corrlab.correlations import box1d, box2d, pair_correlation, triple_correlation
from corrlab.numeric import alpha_fixed
from corrlab.sequences import dilated_points


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--Ns", default="2000,8000,30000")
    ap.add_argument("--pair-exponent", type=float, default=0.6)
    ap.add_argument("--triple-exponent", type=float, default=0.35)
    ap.add_argument("--trials", type=int, default=4)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'N':>7} {'trial':>5} {'R2/2L':>9} {'R3/4L^2':>9}")
    for N in (int(v) for v in args.Ns.split(",")):
        L2 = N**args.pair_exponent
        L3 = N**args.triple_exponent
        for t in range(args.trials):
            alpha = alpha_fixed(int.from_bytes(rng.bytes(32), "big"), 256)
            ps = dilated_points(alpha, 2, N)
            r2 = pair_correlation(ps, L2, box1d(-1, 1)).value / (2 * L2)
            r3 = triple_correlation(ps, L3, box2d(-1, 1, -1, 1)).value / (4 * L3 * L3)
            print(f"{N:>7} {t:>5} {r2:>9.4f} {r3:>9.4f}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Tabulate the delta variance sum against its polylog envelope.

For each prime q and truncation exponent, prints the variance sum over all
(c1, c2) cells, the upper reference (log q)^3 M^3 + (log q)^6 q^2, their
ratio, and whether the 0.1 M^3 lower bound applies and holds.
"""

import argparse
import math

from corrlab.modcount import delta_sq_sum


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", default="101,211,401,809")
    ap.add_argument("--exponents", default="0.3,0.5,0.66")
    args = ap.parse_args()

    print(f"{'q':>6} {'M':>5} {'sum delta^2':>14} {'upper ref':>14} {'ratio':>10} {'lower':>6}")
    for q in (int(v) for v in args.primes.split(",")):
        for expo in (float(v) for v in args.exponents.split(",")):
            M = math.ceil(q**expo)
            v = delta_sq_sum(q, M)
            upper = math.log(q) ** 3 * M**3 + math.log(q) ** 6 * q**2
            lower = "-"
            if M <= 0.2 * q ** (2.0 / 3.0):
                lower = "ok" if v >= 0.1 * M**3 else "FAIL"
            print(f"{q:>6} {M:>5} {v:>14.5g} {upper:>14.5g} {v/upper:>10.3g} {lower:>6}")


if __name__ == "__main__":
    main()

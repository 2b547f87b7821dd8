"""Minimum total bribe to silence every eligible holder, by dispute round."""

import argparse
from fractions import Fraction

from ckoracle.analysis import bribe_search, coalition_threshold, to_fraction


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--I", default="100")
    ap.add_argument("--a", default="2/5")
    ap.add_argument("--d", default="10")
    ap.add_argument("--holders", type=int, default=13)
    ap.add_argument("--k-max", type=int, default=6)
    args = ap.parse_args()
    I, a, d = map(to_fraction, (args.I, args.a, args.d))
    print(f"I={I} a={a} d={d} holders={args.holders}")
    print(f"{'k':>3} {'per holder':>11} {'total':>10} {'safe':>6} {'best bribe profit':>18}")
    for k in range(1, args.k_max + 1):
        t = coalition_threshold(I, a, d, k, args.holders)
        stakes = [2 ** k * d] * min(args.holders, 12)
        profit = bribe_search(I, a, d, k, stakes) if args.holders <= 12 else None
        print(f"{k:>3} {str(a * 2 ** k * d):>11} {str(t.min_bribe_total):>10} {str(t.safe):>6} "
              f"{'' if profit is None else str(profit):>18}")


if __name__ == "__main__":
    main()

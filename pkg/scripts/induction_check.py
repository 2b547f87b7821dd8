"""Check the dispute-sequence induction inequalities for a range of ROI values."""

import argparse
from fractions import Fraction

from ckoracle.analysis import EconomicParams, dispute_sequence_induction_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m-max", type=int, default=10)
    ap.add_argument("--a", default="1/10,1/4,2/5,49/100,1/2")
    args = ap.parse_args()
    for a in map(Fraction, args.a.split(",")):
        rep = dispute_sequence_induction_check(EconomicParams(a=a), args.m_max)
        broken = sorted({v.inequality for v in rep.violations})
        print(f"a={str(a):>7}  checked={rep.checked:>5}  {'pass' if rep.passed else 'FAIL ' + ', '.join(broken)}")


if __name__ == "__main__":
    main()

"""Sweep the lie benefit I across the soundness bound with best-response agents on A0."""

import argparse
from fractions import Fraction

from ckoracle.agents import StrategySpec
from ckoracle.analysis import EconomicParams, soundness_check
from ckoracle.harness import ScenarioConfig, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--queries", type=int, default=20)
    ap.add_argument("--steps", type=int, default=10)
    args = ap.parse_args()
    genesis = {"r1": 30, "r2": 30, "r3": 40, "q": 0}
    strategies = {a: StrategySpec("BestResponseReporter") for a in genesis if a != "q"}
    strategies["q"] = StrategySpec("HonestQuerier")
    params = EconomicParams(I=0, p=2, p_prime=1, b=5, phi=1, pool_size=100)
    cfg = ScenarioConfig("A0", ("True", "False"), ("True",), genesis, params, strategies, "q",
                         queries=args.queries)
    bound = params.min_lie_cost
    values = [bound * Fraction(i, args.steps // 2) for i in range(args.steps + 1)]
    print(f"soundness bound 1/2 (p - p') |T| = {bound}")
    print(f"{'I':>8} {'sound':>6} {'truthful':>9} {'forks':>6} {'dead':>5}")
    for row in sweep([cfg], "params.I", values):
        sound = soundness_check(params.with_(I=row.value))
        print(f"{str(row.value):>8} {str(sound):>6} {str(row.truthful_rate):>9} {row.forks:>6} {row.dead:>5}")


if __name__ == "__main__":
    main()

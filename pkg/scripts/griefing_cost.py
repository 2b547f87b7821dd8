"""Cost for a griefing querier to force one fork, A1 against A2, across fork thresholds."""

import argparse

from ckoracle.agents import StrategySpec
from ckoracle.analysis import EconomicParams
from ckoracle.harness import ScenarioConfig, run_scenario


def fork_cost(mechanism, d, M, holders, capital):
    genesis = {f"r{i}": holders for i in range(1, 5)}
    genesis["g"] = capital
    strategies = {a: StrategySpec("ThresholdDisputer") for a in genesis if a != "g"}
    strategies["g"] = StrategySpec("GriefingQuerier")
    params = EconomicParams(I=10, p=1, b=5, phi=0, pool_size=sum(genesis.values()), d=d, M=M)
    cfg = ScenarioConfig(mechanism, ("True", "False"), ("True",), genesis, params, strategies, "g", queries=1)
    rec = run_scenario(cfg).records[0]
    return rec, -rec.token_delta.get("g", 0)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--thresholds", default="8,64,256,1024,4096")
    args = ap.parse_args()
    _, a1 = fork_cost("A1", args.d, 2 * args.d, 50, 50)
    print(f"A1: one fork costs the griefer {a1} token(s)")
    print(f"{'M':>6} {'rounds':>6} {'forked':>6} {'griefer cost':>13} {'burned':>10} {'vs A1':>8}")
    for M in map(int, args.thresholds.split(",")):
        rec, cost = fork_cost("A2", args.d, M, 2 * M, 4 * M)
        print(f"{M:>6} {rec.dispute_rounds:>6} {str(rec.forked):>6} {str(cost):>13} "
              f"{float(rec.burned):>10.1f} {float(cost / a1):>7.0f}x")


if __name__ == "__main__":
    main()

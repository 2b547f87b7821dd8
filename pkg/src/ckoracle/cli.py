"""Command-line front end: simulate, analyze and solve."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from .analysis import (
    A0_HONEST,
    a1_behaviors,
    build_a0_stage_game,
    build_a1_dispute_game,
    coalition_threshold,
    dispute_sequence_induction_check,
    honest_minmax_margins,
    individually_rational,
    nash_enumerate,
    soundness_check,
    solve_spe,
    subgame_perfect_by_enumeration,
    tenability,
    to_fraction,
)
from .config import ConfigError, encode, load_params, load_scenario, params_to_dict, scenario_to_dict
from .harness import InvariantViolation, ScenarioError, SWEEP_AXES, run_scenario, sweep, with_axis

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT = 0, 1, 2
GAMES = ("a0-stage", "a1-dispute", "a2-sequence")


def _profile_str(profile) -> str:
    return ", ".join(f"{node}={move}" for node, move in profile)


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v) if v.denominator == 1 else f"{v} (~{float(v):.6g})"
    return str(v)


def _trace_result(trace) -> Dict[str, Any]:
    return {
        "summary": trace.summary(),
        "queries": [
            {
                "index": r.index, "truth": r.truth, "outcome": r.outcome, "status": r.status,
                "tentative": r.tentative, "forked": r.forked, "dispute_rounds": r.dispute_rounds,
                "disputers": list(r.disputers), "pool_before": r.pool_before, "pool_after": r.pool_after,
                "burned": r.burned, "currency_delta": r.currency_delta, "token_delta": r.token_delta,
                "note": r.note,
            }
            for r in trace.records
        ],
        "final_currency": trace.final_currency,
        "final_tokens": trace.final_tokens,
    }


def _parse_sweep(text: str):
    if "=" not in text:
        raise ConfigError("expected FIELD=v1,v2,...", "--sweep")
    axis, _, vals = text.partition("=")
    axis = axis.strip()
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis; choose from {', '.join(SWEEP_AXES)}", "--sweep")
    values = []
    for v in filter(None, (s.strip() for s in vals.split(","))):
        try:
            values.append(int(v) if axis in ("seed", "queries") else to_fraction(v))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad sweep value {v!r}", "--sweep") from exc
    return axis, values


def cmd_simulate(args) -> Dict[str, Any]:
    cfg = load_scenario(args.config)
    if args.seed is not None:
        cfg = with_axis(cfg, "seed", args.seed)
    report = {"mode": "simulate", "config": scenario_to_dict(cfg), "seed": cfg.seed}
    if args.sweep:
        axis, values = _parse_sweep(args.sweep)
        rows = sweep([cfg], axis, values)
        report["results"] = {"sweep": {"axis": axis, "rows": [
            {"value": r.value, "truthful_rate": r.truthful_rate, "forks": r.forks,
             "burned": r.burned, "dead": r.dead} for r in rows]}}
    else:
        report["results"] = {"trace": _trace_result(run_scenario(cfg))}
    report["audits"] = {"invariants": "held", "checked_per_query": [
        "token-conservation", "token-identities", "currency-balance", "fork-partition",
        "pool-monotone" if cfg.mechanism == "A0" else "pool-unchanged-without-fork"]}
    return report


def cmd_analyze(args) -> Dict[str, Any]:
    ac = load_params(args.config)
    p = ac.params
    try:
        ten = tenability(p)
        ten_out = {"x_min": ten.x_min, "implied_price": ten.implied_price, "satisfied": ten.satisfied}
    except ValueError as exc:
        ten_out = {"error": str(exc)}
    thresholds = []
    for k in range(1, ac.k_max + 1):
        t = coalition_threshold(p.I, p.a, p.d, k, ac.n_holders)
        thresholds.append({"k": k, "min_bribe_total": t.min_bribe_total, "safe": t.safe})
    return {
        "mode": "analyze",
        "config": {"params": params_to_dict(p), "coalition": {"k_max": ac.k_max, "n_holders": ac.n_holders}},
        "seed": None,
        "results": {
            "soundness": {"sound": soundness_check(p), "I": p.I, "bound": p.min_lie_cost},
            "tenability": ten_out,
            "coalition": thresholds,
            "individually_rational": individually_rational(p),
            "b_exceeds_fee": p.b > p.phi,
        },
        "audits": {},
    }


def _equilibria(game, spe, nash) -> Dict[str, Any]:
    return {
        "spe": [{"profile": _profile_str(s), "payoffs": spe.payoffs[s]} for s in spe.spe_profiles],
        "unique_spe": spe.unique_spe,
        "nash": [_profile_str(s) for s in nash.nash_profiles],
        "minmax": nash.minmax,
        "spe_subset_of_nash": set(spe.spe_profiles) <= set(nash.nash_profiles),
    }


def cmd_solve(args) -> Dict[str, Any]:
    if args.game not in GAMES:
        raise ConfigError(f"unknown game; choose from {', '.join(GAMES)}", "game")
    ac = load_params(args.config)
    p = ac.params
    report = {"mode": "solve", "config": {"game": args.game, "params": params_to_dict(p)}, "seed": None}
    if args.game == "a0-stage":
        game = build_a0_stage_game(p)
        spe, nash = solve_spe(game), nash_enumerate(game)
        res = _equilibria(game, spe, nash)
        margins = honest_minmax_margins(p, nash.minmax)
        res.update({
            "sound": soundness_check(p),
            "honest_in_spe": A0_HONEST in spe.spe_profiles,
            "honest_pareto_efficient": nash.pareto.get(A0_HONEST, False),
            "honest_minmax_margins": margins,
            "honest_above_minmax": all(m > 0 for m in margins.values()),
        })
    elif args.game == "a1-dispute":
        game = build_a1_dispute_game(p, honest_fork=True)
        spe, nash = solve_spe(game), nash_enumerate(game)
        res = _equilibria(game, spe, nash)
        brute = subgame_perfect_by_enumeration(game)
        res.update({
            "behaviors": a1_behaviors(spe.spe_profiles[0]) if spe.unique_spe else {},
            "brute_force_spe": [_profile_str(s) for s in brute],
            "brute_force_agrees": sorted(brute) == sorted(spe.spe_profiles),
        })
    else:
        rep = dispute_sequence_induction_check(p, ac.m_max)
        res = {
            "a": rep.a, "m_max": rep.m_max, "checked": rep.checked, "passed": rep.passed,
            "violated": sorted({v.inequality for v in rep.violations}),
            "first_violations": [
                {"inequality": v.inequality, "round": v.round, "lhs": v.lhs, "rhs": v.rhs}
                for v in rep.violations[:5]
            ],
        }
    report["results"] = res
    report["audits"] = {}
    return report


def render_table(report: Dict[str, Any]) -> str:
    lines = [f"mode: {report['mode']}"]
    if report.get("seed") is not None:
        lines.append(f"seed: {report['seed']}")
    res = report["results"]
    if report["mode"] == "simulate" and "trace" in res:
        lines.append(f"{'#':>4} {'truth':<10} {'outcome':<10} {'status':<8} {'fork':<5} {'rounds':>6} "
                     f"{'pool':>11} {'burned':>10}")
        for q in res["trace"]["queries"]:
            lines.append(f"{q['index']:>4} {q['truth']:<10} {str(q['outcome']):<10} {q['status']:<8} "
                         f"{'yes' if q['forked'] else 'no':<5} {q['dispute_rounds']:>6} "
                         f"{str(q['pool_before']) + '->' + str(q['pool_after']):>11} {str(q['burned']):>10}")
        lines.append("summary:")
        lines.extend(f"  {k:<16} {_fmt(v)}" for k, v in res["trace"]["summary"].items())
    elif report["mode"] == "simulate":
        sw = res["sweep"]
        lines.append(f"{sw['axis']:>12} {'truthful':>10} {'forks':>6} {'burned':>10} {'dead':>5}")
        for r in sw["rows"]:
            lines.append(f"{str(r['value']):>12} {str(r['truthful_rate']):>10} {r['forks']:>6} "
                         f"{str(r['burned']):>10} {r['dead']:>5}")
    else:
        for key, value in res.items():
            if isinstance(value, list) and value and isinstance(value[0], dict):
                lines.append(f"{key}:")
                for row in value:
                    lines.append("  " + "  ".join(f"{k}={_fmt(v)}" for k, v in row.items()))
            elif isinstance(value, dict):
                lines.append(f"{key}:")
                lines.extend(f"  {k:<28} {_fmt(v)}" for k, v in value.items())
            elif isinstance(value, list):
                lines.append(f"{key}:")
                lines.extend(f"  {_fmt(v)}" for v in value)
            else:
                lines.append(f"{key:<30} {_fmt(value)}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ckoracle", description="Token-staked oracle simulator and analyzer")
    sub = parser.add_subparsers(dest="mode", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", help="write the machine report here")
        p.add_argument("--format", choices=("table", "machine"), default="table")

    sim = sub.add_parser("simulate", help="run a scenario")
    common(sim)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--sweep", help="FIELD=v1,v2,... e.g. params.I=1,2,3")
    common(sub.add_parser("analyze", help="closed-form checks on a parameter file"))
    solve = sub.add_parser("solve", help="solve one of the stage games")
    solve.add_argument("game", help=" | ".join(GAMES))
    common(solve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"simulate": cmd_simulate, "analyze": cmd_analyze, "solve": cmd_solve}
    try:
        report = handlers[args.mode](args)
    except (ConfigError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = json.dumps(encode(report), indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text if args.format == "machine" else render_table(report))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Reporter and querier strategies consulted by the scenario harness."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, FrozenSet, Mapping, Optional, Tuple

from .analysis import (
    EconomicParams,
    build_a0_stage_game,
    build_a1_dispute_game,
    final_round_payoffs,
    solve_spe,
    step_round_payoffs,
)
from .analysis.builders import PF, PT
from .core import INVALID, OutcomeSpace
from .dispute import DisputeView

REPORTER_KINDS = (
    "TruthfulReporter",
    "LyingReporter",
    "AbstainingReporter",
    "BribedReporter",
    "ThresholdDisputer",
    "BestResponseReporter",
)
QUERIER_KINDS = (
    "HonestQuerier",
    "DeviantQuerier",
    "GriefingQuerier",
    "CoalitionController",
    "BestResponseQuerier",
)


@dataclass(frozen=True)
class StrategySpec:
    kind: str
    options: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in REPORTER_KINDS + QUERIER_KINDS:
            raise ValueError(f"unknown strategy kind {self.kind!r}")

    @property
    def is_querier(self) -> bool:
        return self.kind in QUERIER_KINDS


@dataclass(frozen=True)
class QueryContext:
    mechanism: str
    omega: OutcomeSpace
    truth: str
    params: EconomicParams
    bribes: Mapping[str, Fraction] = field(default_factory=dict)

    @property
    def dispute_roi(self) -> Fraction:
        # A single round pays the querier's d on a 2d dispute.
        return Fraction(1, 2) if self.mechanism == "A1" else self.params.a

    def false_outcome(self, preferred: Optional[str] = None) -> str:
        if preferred is not None and preferred != self.truth and preferred in self.omega:
            return preferred
        for label in self.omega:
            if label not in (self.truth, INVALID):
                return label
        for label in self.omega:
            if label != self.truth:
                return label
        return self.truth


@lru_cache(maxsize=256)
def bloc_tells_truth(params: EconomicParams) -> bool:
    """True when every SPE of the stage game with an always-PunishFalse querier has the bloc report True."""
    result = solve_spe(build_a0_stage_game(params))
    moves = [dict(p) for p in result.spe_profiles]
    honest_querier = [m for m in moves if m["querier|True"] == PF and m["querier|False"] == PF]
    return bool(honest_querier) and all(m["bloc"] == "True" for m in honest_querier)


@lru_cache(maxsize=256)
def a1_equilibrium(params: EconomicParams) -> Dict[str, str]:
    """Moves of the first SPE of the single-dispute game with honest forks."""
    result = solve_spe(build_a1_dispute_game(params, honest_fork=True))
    return dict(result.spe_profiles[0])


class Agent:
    """Base behaviour: report the truth, never dispute."""

    def __init__(self, name: str, spec: StrategySpec):
        self.name = name
        self.spec = spec
        self.opt = dict(spec.options)

    def fork_report(self, ctx: QueryContext) -> Optional[str]:
        return ctx.truth

    def dispute(self, view: DisputeView, ctx: QueryContext) -> Optional[str]:
        return None

    # querier hooks
    def tentative(self, ctx: QueryContext) -> str:
        return ctx.truth

    def punish(self, ctx: QueryContext) -> str:
        return PF

    def bribes(self, ctx: QueryContext) -> Dict[str, Fraction]:
        return {}

    @property
    def attacker(self) -> bool:
        return False


class TruthfulReporter(Agent):
    pass


class LyingReporter(Agent):
    def fork_report(self, ctx):
        return ctx.false_outcome(self.opt.get("target"))


class AbstainingReporter(Agent):
    def fork_report(self, ctx):
        return None


class ThresholdDisputer(Agent):
    """Disputes false tentative outcomes in favour of the truth when the reward clears ``min_gain``."""

    def reward(self, view: DisputeView, ctx: QueryContext) -> Fraction:
        return ctx.dispute_roi * view.required

    def dispute(self, view, ctx):
        if view.tentative == ctx.truth:
            return None
        if self.reward(view, ctx) > Fraction(self.opt.get("min_gain", 0)):
            return ctx.truth
        return None


class BribedReporter(ThresholdDisputer):
    """Stays silent when its bribe covers the dispute reward; ``mode='lie'`` also lies in forks."""

    def bribe(self, ctx: QueryContext) -> Fraction:
        if self.name in ctx.bribes:
            return ctx.bribes[self.name]
        return Fraction(self.opt.get("bribe", 0))

    def fork_report(self, ctx):
        if self.opt.get("mode", "silence") == "lie":
            return ctx.false_outcome(self.opt.get("target"))
        return ctx.truth

    def dispute(self, view, ctx):
        if view.tentative != ctx.truth and self.bribe(ctx) >= self.reward(view, ctx):
            return None
        return super().dispute(view, ctx)


class BestResponseReporter(Agent):
    """Asks the game solvers what to do at each decision point."""

    def fork_report(self, ctx):
        if bloc_tells_truth(ctx.params):
            return ctx.truth
        return ctx.false_outcome(self.opt.get("target"))

    def dispute(self, view, ctx):
        tentative_true = view.tentative == ctx.truth
        if ctx.mechanism == "A1":
            move = a1_equilibrium(ctx.params)["reporter|True" if tentative_true else "reporter|False"]
            go = move == "Dispute"
        else:
            on_true = Fraction(view.committed.get(ctx.truth, 0))
            on_false = Fraction(sum(v for k, v in view.committed.items() if k != ctx.truth))
            # Stakes in these payoffs are relative to the query's initial stake d.
            d = ctx.params.d
            k = view.round
            if view.required >= ctx.params.M:
                go_pay, stay_pay = final_round_payoffs(ctx.params.a, d, k, on_true, on_false, 1,
                                                       tentative_true)
            else:
                go_pay, stay_pay = step_round_payoffs(ctx.params.a, d, k + 1, on_true, on_false,
                                                      tentative_true)
            go = go_pay > stay_pay
        if not go:
            return None
        return ctx.false_outcome(self.opt.get("target")) if tentative_true else ctx.truth


class HonestQuerier(Agent):
    pass


class DeviantQuerier(Agent):
    def punish(self, ctx):
        return PT


class GriefingQuerier(Agent):
    """Proposes a false outcome and, given the chance, re-disputes every True tentative."""

    def tentative(self, ctx):
        return ctx.false_outcome(self.opt.get("target"))

    def dispute(self, view, ctx):
        if view.tentative == ctx.truth:
            return ctx.false_outcome(self.opt.get("target"))
        return None

    @property
    def attacker(self):
        return True


class CoalitionController(Agent):
    """Proposes a false outcome and pays members per ``imputation`` to stay silent."""

    def tentative(self, ctx):
        return ctx.false_outcome(self.opt.get("target"))

    def bribes(self, ctx):
        members = self.opt.get("members", list(self.opt.get("imputation", {})))
        imputation = self.opt.get("imputation", {})
        return {m: Fraction(imputation.get(m, 0)) for m in members}

    @property
    def attacker(self):
        return True


class BestResponseQuerier(Agent):
    def tentative(self, ctx):
        if ctx.mechanism == "A0":
            return ctx.truth
        move = a1_equilibrium(ctx.params)["querier"]
        return ctx.truth if move == "TrueTentative" else ctx.false_outcome()


KINDS = {cls.__name__: cls for cls in (
    TruthfulReporter, LyingReporter, AbstainingReporter, BribedReporter, ThresholdDisputer,
    BestResponseReporter, HonestQuerier, DeviantQuerier, GriefingQuerier, CoalitionController,
    BestResponseQuerier,
)}


def make_agent(name: str, spec: StrategySpec) -> Agent:
    return KINDS[spec.kind](name, spec)

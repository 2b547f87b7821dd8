"""Run oracle scenarios end to end and audit the ledger after every query."""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from .agents import QueryContext, StrategySpec, make_agent
from .analysis import EconomicParams
from .core import INVALID, SINK, Ledger, ModelError, make_outcome_space
from .dispute import a1_query, a2_query
from .mechanisms import OracleDead, OracleState, a0_query

MECHANISMS = ("A0", "A1", "A2")


class ScenarioError(ValueError):
    """Invalid scenario configuration; ``field`` names the offending entry."""

    def __init__(self, message: str, field: str = ""):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class InvariantViolation(RuntimeError):
    def __init__(self, query: int, name: str, detail: str = ""):
        super().__init__(f"query {query}: invariant {name!r} violated {detail}".rstrip())
        self.query = query
        self.name = name


@dataclass(frozen=True)
class ScenarioConfig:
    mechanism: str
    labels: Tuple[str, ...]
    truths: Tuple[str, ...]
    genesis: Mapping[str, int]
    params: EconomicParams
    strategies: Mapping[str, StrategySpec]
    querier: str
    queries: int = 1
    seed: int = 0
    priority: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "truths", tuple(self.truths))
        object.__setattr__(self, "priority", tuple(self.priority))
        self.validate()

    @property
    def omega(self):
        return make_outcome_space(self.labels)

    def truth_at(self, i: int) -> str:
        return self.truths[i % len(self.truths)]

    def validate(self) -> None:
        if self.mechanism not in MECHANISMS:
            raise ScenarioError(f"must be one of {MECHANISMS}", "mechanism")
        try:
            omega = self.omega
        except ModelError as exc:
            raise ScenarioError(str(exc), "labels") from exc
        if not self.truths:
            raise ScenarioError("at least one ground-truth outcome is required", "truths")
        for t in self.truths:
            if t not in omega:
                raise ScenarioError(f"{t!r} is not in Omega {omega.labels}", "truths")
        if self.queries < 0:
            raise ScenarioError("must be non-negative", "queries")
        if any(c < 0 for c in self.genesis.values()):
            raise ScenarioError("allocations must be non-negative", "genesis")
        if SINK in self.genesis:
            raise ScenarioError(f"{SINK!r} is reserved", "genesis")
        queriers = [a for a, s in self.strategies.items() if s.is_querier]
        if queriers != [self.querier]:
            raise ScenarioError(f"exactly one querier strategy expected, for {self.querier!r}; got {queriers}",
                                "strategies")
        missing = [a for a in self.genesis if a not in self.strategies]
        if missing:
            raise ScenarioError(f"no strategy for token holders {missing}", "strategies")
        if self.mechanism != "A0":
            if self.params.d.denominator != 1 or self.params.d < 1:
                raise ScenarioError("initial stake d must be a positive whole number of tokens", "params.d")
            if self.params.M.denominator != 1 or self.params.M <= self.params.d:
                raise ScenarioError("threshold M must be a whole number greater than d", "params.M")
        if self.mechanism == "A2" and self.params.a >= Fraction(1, 2):
            raise ScenarioError("dispute ROI must be below 1/2 for A2", "params.a")


@dataclass
class QueryTrace:
    index: int
    truth: str
    outcome: Optional[str]
    status: str = "ok"  # ok | dead | rejected
    tentative: Optional[str] = None
    forked: bool = False
    dispute_rounds: int = 0
    disputers: Tuple[str, ...] = ()
    pool_before: int = 0
    pool_after: int = 0
    burned: Fraction = Fraction(0)
    currency_delta: Dict[str, Fraction] = field(default_factory=dict)
    token_delta: Dict[str, Fraction] = field(default_factory=dict)
    note: str = ""


@dataclass
class Trace:
    config: ScenarioConfig
    records: List[QueryTrace] = field(default_factory=list)
    final_currency: Dict[str, Fraction] = field(default_factory=dict)
    final_tokens: Dict[str, Fraction] = field(default_factory=dict)

    def valid_records(self) -> List[QueryTrace]:
        return [r for r in self.records if r.truth != INVALID]

    @property
    def truthful_rate(self) -> Fraction:
        valid = self.valid_records()
        if not valid:
            return Fraction(1)
        return Fraction(sum(r.outcome == r.truth for r in valid), len(valid))

    @property
    def forks(self) -> int:
        return sum(r.forked for r in self.records)

    @property
    def burned(self) -> Fraction:
        return sum((r.burned for r in self.records), Fraction(0))

    @property
    def pool_attrition(self) -> int:
        if not self.records:
            return 0
        return self.records[0].pool_before - self.records[-1].pool_after

    def summary(self) -> Dict[str, Any]:
        return {
            "queries": len(self.records),
            "truthful_rate": self.truthful_rate,
            "forks": self.forks,
            "burned": self.burned,
            "pool_attrition": self.pool_attrition,
            "dead": sum(r.status == "dead" for r in self.records),
        }


def _delta(after: Mapping[str, Fraction], before: Mapping[str, Fraction]) -> Dict[str, Fraction]:
    keys = sorted(set(after) | set(before))
    out = {}
    for k in keys:
        diff = after.get(k, Fraction(0)) - before.get(k, Fraction(0))
        if diff:
            out[k] = diff
    return out


def _audit(i: int, ledger: Ledger, mechanism: str, before, after: OracleState) -> None:
    if ledger.total_tokens() != ledger.genesis_supply:
        raise InvariantViolation(i, "token-conservation",
                                 f"({ledger.total_tokens()} != {ledger.genesis_supply})")
    if set(ledger.owner) != set(range(ledger.genesis_supply)):
        raise InvariantViolation(i, "token-identities")
    if ledger.total_currency() != ledger.external:
        raise InvariantViolation(i, "currency-balance",
                                 f"({ledger.total_currency()} != {ledger.external})")
    rec = after.history[-1]
    if rec.forked and rec.partition is not None:
        if rec.partition.union() != before.pool or rec.partition.total() != len(before.pool):
            raise InvariantViolation(i, "fork-partition")
    if mechanism == "A0" and not after.pool <= before.pool:
        raise InvariantViolation(i, "pool-monotone")
    if mechanism != "A0" and not rec.forked and after.pool != before.pool:
        raise InvariantViolation(i, "pool-unchanged-without-fork")


def _settle_benefits(ledger: Ledger, cfg: ScenarioConfig, querier, outcome: str, truth: str, rec) -> None:
    params = cfg.params
    if outcome == truth:
        if params.b:
            ledger.credit(cfg.querier, params.b)
        return
    if not params.I:
        return
    if querier.attacker:
        ledger.credit(cfg.querier, params.I)
        return
    # An honest querier's loss is the liars' gain, pro rata over the winning cell.
    if rec.partition is None:
        return
    cell = rec.partition[outcome]
    owners = ledger.owners(cell)
    for agent, held in owners.items():
        share = params.I * len(held) / len(cell)
        ledger.currency[cfg.querier] = ledger.balance(cfg.querier) - share
        ledger.currency[agent] = ledger.balance(agent) + share


def run_scenario(config: ScenarioConfig) -> Trace:
    """Run ``config.queries`` queries of the configured oracle and return the audited trace."""
    cfg = config
    omega = cfg.omega
    rng = random.Random(cfg.seed)
    ledger = Ledger.genesis(cfg.genesis)
    agents = {name: make_agent(name, spec) for name, spec in cfg.strategies.items()}
    querier = agents[cfg.querier]
    state = OracleState.genesis(ledger)
    trace = Trace(cfg)
    priority = list(cfg.priority) or None

    for i in range(1, cfg.queries + 1):
        truth = cfg.truth_at(i - 1)
        base = QueryContext(cfg.mechanism, omega, truth, cfg.params)
        bribes = querier.bribes(base)
        ctx = replace(base, bribes=bribes)
        event = f"E{i}"
        cur_before = dict(ledger.currency)
        tok_before = dict(ledger.tokens)
        rec_out = QueryTrace(i, truth, None, pool_before=len(state.pool), pool_after=len(state.pool))

        if not state.pool:
            rec_out.status = "dead"
            rec_out.note = "reporting pool is empty"
            trace.records.append(rec_out)
            continue

        for member, amount in bribes.items():
            if amount:
                ledger.currency[cfg.querier] = ledger.balance(cfg.querier) - amount
                ledger.currency[member] = ledger.balance(member) + amount

        def iface(agent, event_id, omega_, tokens, _ctx=ctx):
            return agents[agent].fork_report(_ctx) if agent in agents else None

        policies = {name: (lambda view, a=a: a.dispute(view, ctx)) for name, a in agents.items()}
        punish = querier.punish(ctx)
        before = state
        try:
            if cfg.mechanism == "A0":
                outcome, state = a0_query(state, event, omega, cfg.params.phi, iface, ledger, rng,
                                          querier=cfg.querier, truth=truth, punish=punish)
            else:
                tentative = querier.tentative(ctx)
                d = int(cfg.params.d)
                own = sorted(ledger.holdings(cfg.querier, state.pool))
                if len(own) < d:
                    rec_out.status = "rejected"
                    rec_out.note = f"querier holds {len(own)} pool tokens, needs d={d}"
                    trace.records.append(rec_out)
                    continue
                stake = own[:d]
                if cfg.mechanism == "A1":
                    outcome, state = a1_query(state, event, omega, cfg.params.phi, tentative, stake,
                                              iface, policies, ledger, rng, querier=cfg.querier,
                                              truth=truth, punish=punish, priority=priority)
                else:
                    outcome, state = a2_query(state, event, omega, cfg.params.phi, tentative, stake,
                                              iface, policies, ledger, rng,
                                              threshold=int(cfg.params.M), roi=cfg.params.a,
                                              querier=cfg.querier, truth=truth, punish=punish,
                                              priority=priority)
        except OracleDead as exc:
            rec_out.status = "dead"
            rec_out.note = str(exc)
            trace.records.append(rec_out)
            continue

        rec = state.history[-1]
        _settle_benefits(ledger, cfg, querier, outcome, truth, rec)
        _audit(i, ledger, cfg.mechanism, before, state)

        rec_out.outcome = outcome
        rec_out.tentative = rec.tentative
        rec_out.forked = rec.forked
        rec_out.dispute_rounds = rec.dispute_rounds
        rec_out.disputers = rec.disputers
        rec_out.burned = rec.burned
        rec_out.pool_after = len(state.pool)
        rec_out.currency_delta = _delta(ledger.currency, cur_before)
        rec_out.token_delta = _delta(ledger.tokens, tok_before)
        trace.records.append(rec_out)

    trace.final_currency = {k: v for k, v in sorted(ledger.currency.items())}
    trace.final_tokens = {k: v for k, v in sorted(ledger.tokens.items())}
    return trace


SWEEP_AXES = ("seed", "queries") + tuple(f"params.{f}" for f in (
    "I", "p", "p_prime", "b", "phi", "pool_size", "d", "M", "a", "Y", "n_freq", "x"))


def with_axis(config: ScenarioConfig, axis: str, value) -> ScenarioConfig:
    if axis not in SWEEP_AXES:
        raise ScenarioError(f"unknown sweep axis; choose from {SWEEP_AXES}", axis)
    if axis.startswith("params."):
        return replace(config, params=config.params.with_(**{axis.split(".", 1)[1]: value}))
    return replace(config, **{axis: int(value)})


@dataclass
class SweepRow:
    config: int
    value: Any
    truthful_rate: Fraction
    forks: int
    burned: Fraction
    dead: int


def sweep(configs: Sequence[ScenarioConfig], axis: str, values: Sequence) -> List[SweepRow]:
    """Re-run every config at every value of ``axis``."""
    if axis not in SWEEP_AXES:
        raise ScenarioError(f"unknown sweep axis; choose from {SWEEP_AXES}", axis)
    rows = []
    for ci, cfg in enumerate(configs):
        for v in values:
            s = run_scenario(with_axis(cfg, axis, v)).summary()
            rows.append(SweepRow(ci, v, s["truthful_rate"], s["forks"], s["burned"], s["dead"]))
    return rows

"""Dispute rounds, escalating dispute sequences and the two dispute oracles."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from .core import (
    ABSTAIN,
    SINK,
    AgentId,
    Ledger,
    ModelError,
    OmegaPartition,
    OutcomeSpace,
    TokenId,
    partition_assign,
)
from .mechanisms import (
    PUNISH_FALSE,
    OracleDead,
    OracleState,
    PunishPolicy,
    QueryRecord,
    ReporterInterface,
    _settle,
    distribute,
    fork,
    pay,
    plurality_winner,
    surviving_tokens,
)

DEFAULT_ROI = Fraction(2, 5)


@dataclass(frozen=True)
class DisputeView:
    """What an agent sees when offered the chance to dispute."""

    event: str
    omega: OutcomeSpace
    tentative: str
    stakes: OmegaPartition
    required: int
    round: int
    agent: AgentId
    free_tokens: int
    committed: Mapping[str, int]


# Returns the outcome to dispute in favour of, or None to pass.
DisputePolicy = Callable[[DisputeView], Optional[str]]


class RoundResult(NamedTuple):
    tentative: str
    stakes: OmegaPartition
    disputed: bool
    disputer: Optional[AgentId] = None


class SequenceResult(NamedTuple):
    tentative: str
    stakes: OmegaPartition
    everdisputed: bool
    bigdispute: bool
    rounds: Tuple[Tuple[int, Optional[AgentId], str, int], ...] = ()


def _priority(agents: Iterable[AgentId], priority: Optional[Sequence[AgentId]]) -> List[AgentId]:
    agents = set(agents)
    head = [a for a in (priority or ()) if a in agents]
    return head + sorted(agents - set(head))


def dispute_round(
    event: str,
    omega: OutcomeSpace,
    tentative: str,
    stakes: OmegaPartition,
    required: int,
    policies: Mapping[AgentId, DisputePolicy],
    pool: Iterable[TokenId],
    ledger: Ledger,
    *,
    round_index: int = 1,
    priority: Optional[Sequence[AgentId]] = None,
) -> RoundResult:
    """Offer one dispute window; the first willing agent in priority order wins it.

    Agents without ``required`` free pool tokens are skipped.
    """
    if stakes.size(tentative) == 0:
        raise ModelError("dispute round needs stake on the tentative outcome")
    if required <= 0:
        raise ModelError("required dispute stake must be positive")
    free = frozenset(pool) - stakes.union()
    by_owner = ledger.owners(free)
    for agent in _priority(by_owner, priority):
        if agent == SINK or agent not in policies:
            continue
        held = by_owner[agent]
        if len(held) < required:
            continue
        committed = {w: len(ledger.holdings(agent, stakes[w])) for w in omega}
        view = DisputeView(event, omega, tentative, stakes, required, round_index,
                           agent, len(held), committed)
        choice = policies[agent](view)
        if choice is None:
            continue
        if choice == tentative:
            raise ModelError(f"{agent!r} tried to dispute in favour of the tentative outcome")
        if choice not in omega:
            raise ModelError(f"{agent!r} disputed in favour of {choice!r}, not in Omega")
        staked = sorted(held)[:required]
        return RoundResult(choice, partition_assign(stakes, choice, staked), True, agent)
    return RoundResult(tentative, stakes, False, None)


def dispute_sequence(
    event: str,
    omega: OutcomeSpace,
    tentative: str,
    stakes: OmegaPartition,
    threshold: int,
    policies: Mapping[AgentId, DisputePolicy],
    pool: Iterable[TokenId],
    ledger: Ledger,
    *,
    priority: Optional[Sequence[AgentId]] = None,
) -> SequenceResult:
    """Escalate dispute rounds with stake 2^n * d until one goes undisputed or stake reaches the threshold."""
    d = stakes.size(tentative)
    if d <= 0:
        raise ModelError("dispute sequence needs positive initial stake")
    if threshold <= d:
        raise ModelError(f"fork threshold M={threshold} must exceed initial stake d={d}")
    pool = frozenset(pool)
    n = 1
    ever = False
    rounds = []
    while 2 ** (n - 1) * d < threshold:
        res = dispute_round(event, omega, tentative, stakes, 2 ** n * d, policies, pool,
                            ledger, round_index=n, priority=priority)
        rounds.append((n, res.disputer, res.tentative, 2 ** n * d))
        tentative, stakes = res.tentative, res.stakes
        if not res.disputed:
            return SequenceResult(tentative, stakes, ever, False, tuple(rounds))
        ever = True
        n += 1
    return SequenceResult(tentative, stakes, True, True, tuple(rounds))


def burn_and_distribute(delta, stakes: OmegaPartition, winner: str, ledger: Ledger) -> Ledger:
    """Burn ``delta`` staked tokens and pay the rest pro rata to ``winner``'s stakers."""
    delta = Fraction(delta)
    total = stakes.total()
    if not 0 < delta < total:
        raise ModelError(f"burn amount {delta} outside (0, {total})")
    if stakes.size(winner) == 0:
        raise ModelError(f"no stake on winning outcome {winner!r}")
    _settle(stakes, winner, ledger, total - delta, delta)
    return ledger


def burn_amount(stakes: OmegaPartition, winner: str, roi=DEFAULT_ROI) -> Fraction:
    return stakes.total() - (1 + Fraction(roi)) * stakes.size(winner)


def settle_with_roi(stakes: OmegaPartition, winner: str, ledger: Ledger, roi=DEFAULT_ROI) -> Fraction:
    """Burn down to a fixed ROI for winners; returns the amount burned.

    When the losing stake is already no more than ``roi`` times the winning
    stake nothing is burned and everything is paid out.
    """
    delta = burn_amount(stakes, winner, roi)
    if delta <= 0:
        distribute(stakes, winner, ledger)
        return Fraction(0)
    burn_and_distribute(delta, stakes, winner, ledger)
    return delta


def _fork_with_stakes(event, omega, pool, stakes, iface, ledger, rng):
    pool = frozenset(pool)
    if not stakes.union() <= pool:
        raise ModelError("dispute stake must come from the reporting pool")
    free = pool - stakes.union()
    fresh = fork(event, omega, free, iface, ledger) if free else OmegaPartition.empty(omega)
    winner = plurality_winner(fresh.merged(stakes), rng)
    return fresh, winner


def _collect(fresh: OmegaPartition, stakes: OmegaPartition, winner: str) -> OmegaPartition:
    cells = dict(fresh.cells)
    cells[winner] = cells[winner] | stakes.union()
    return OmegaPartition(fresh.omega, cells)


def choice_by_fork(event, omega, pool, stakes, iface, ledger, rng) -> Tuple[str, OmegaPartition]:
    """Fork the unstaked pool, count committed stake with it, pay stake to winners."""
    fresh, winner = _fork_with_stakes(event, omega, pool, stakes, iface, ledger, rng)
    distribute(stakes, winner, ledger)
    return winner, _collect(fresh, stakes, winner)


def choice_by_fork_prime(event, omega, pool, stakes, iface, ledger, rng, roi=DEFAULT_ROI):
    """As choice_by_fork, but burns stake so winners earn exactly ``roi``.

    Returns (winner, partition, burned).
    """
    fresh, winner = _fork_with_stakes(event, omega, pool, stakes, iface, ledger, rng)
    burned = settle_with_roi(stakes, winner, ledger, roi)
    return winner, _collect(fresh, stakes, winner), burned


def _initial_stakes(omega, tentative, initial_stake, pool, ledger, querier) -> OmegaPartition:
    initial_stake = frozenset(initial_stake)
    if tentative not in omega:
        raise ModelError(f"tentative outcome {tentative!r} not in Omega")
    if not initial_stake:
        raise ModelError("initial stake must be non-empty")
    if not initial_stake <= pool:
        raise ModelError("initial stake must be drawn from the reporting pool")
    if querier is not None and any(ledger.owner[t] != querier for t in initial_stake):
        raise ModelError("querier does not own the initial stake")
    return partition_assign(OmegaPartition.empty(omega), tentative, initial_stake)


def a1_query(
    state: OracleState,
    event: str,
    omega: OutcomeSpace,
    fee,
    tentative: str,
    initial_stake: Iterable[TokenId],
    iface: ReporterInterface,
    policies: Mapping[AgentId, DisputePolicy],
    ledger: Ledger,
    rng: random.Random,
    *,
    querier: Optional[AgentId] = None,
    truth: str,
    punish: PunishPolicy = PUNISH_FALSE,
    priority: Optional[Sequence[AgentId]] = None,
) -> Tuple[str, OracleState]:
    """One query with a single dispute round at stake 2d, forking only if disputed."""
    pool = state.pool
    if not pool:
        raise OracleDead(f"reporting pool is empty at query {state.counter + 1}")
    stakes = _initial_stakes(omega, tentative, initial_stake, pool, ledger, querier)
    pay(pool, fee, ledger, payer=querier)
    d = stakes.total()
    res = dispute_round(event, omega, tentative, stakes, 2 * d, policies, pool, ledger,
                        round_index=1, priority=priority)
    disputers = (res.disputer,) if res.disputer else ()
    log = ((1, res.disputer, res.tentative, 2 * d),)
    if not res.disputed:
        distribute(res.stakes, res.tentative, ledger)
        record = QueryRecord(state.counter + 1, "A1", res.tentative, tentative, dispute_rounds=1,
                             round_log=log)
        return res.tentative, state.advance(pool, record)
    winner, partition = choice_by_fork(event, omega, pool, res.stakes, iface, ledger, rng)
    record = QueryRecord(state.counter + 1, "A1", winner, tentative, forked=True,
                         partition=partition, dispute_rounds=1, disputers=disputers, round_log=log)
    return winner, state.advance(surviving_tokens(partition, truth, punish), record)


def a2_query(
    state: OracleState,
    event: str,
    omega: OutcomeSpace,
    fee,
    tentative: str,
    initial_stake: Iterable[TokenId],
    iface: ReporterInterface,
    policies: Mapping[AgentId, DisputePolicy],
    ledger: Ledger,
    rng: random.Random,
    *,
    threshold: int,
    roi=DEFAULT_ROI,
    querier: Optional[AgentId] = None,
    truth: str,
    punish: PunishPolicy = PUNISH_FALSE,
    priority: Optional[Sequence[AgentId]] = None,
) -> Tuple[str, OracleState]:
    """One query with an escalating dispute sequence; forks once stake reaches ``threshold``.

    Outside a fork the pool is left untouched, even when stake was burned.
    """
    pool = state.pool
    if not pool:
        raise OracleDead(f"reporting pool is empty at query {state.counter + 1}")
    roi = Fraction(roi)
    if not 0 < roi < Fraction(1, 2):
        raise ModelError(f"dispute ROI must lie in (0, 1/2), got {roi}")
    stakes = _initial_stakes(omega, tentative, initial_stake, pool, ledger, querier)
    if threshold <= stakes.total():
        raise ModelError(f"fork threshold M={threshold} must exceed initial stake d={stakes.total()}")
    pay(pool, fee, ledger, payer=querier)
    seq = dispute_sequence(event, omega, tentative, stakes, threshold, policies, pool, ledger,
                           priority=priority)
    disputers = tuple(r[1] for r in seq.rounds if r[1] is not None)
    common = dict(dispute_rounds=len(seq.rounds), disputers=disputers, round_log=seq.rounds)
    if seq.bigdispute:
        winner, partition, burned = choice_by_fork_prime(event, omega, pool, seq.stakes, iface,
                                                         ledger, rng, roi)
        record = QueryRecord(state.counter + 1, "A2", winner, tentative, forked=True,
                             partition=partition, burned=burned, **common)
        return winner, state.advance(surviving_tokens(partition, truth, punish), record)
    if not seq.everdisputed:
        distribute(seq.stakes, seq.tentative, ledger)
        burned = Fraction(0)
    else:
        burned = settle_with_roi(seq.stakes, seq.tentative, ledger, roi)
    record = QueryRecord(state.counter + 1, "A2", seq.tentative, tentative, burned=burned, **common)
    return seq.tentative, state.advance(pool, record)

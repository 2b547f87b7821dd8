"""Fork-based simple oracle and the subroutines shared by every oracle."""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .core import (
    ABSTAIN,
    SINK,
    AgentId,
    Ledger,
    ModelError,
    OmegaPartition,
    OutcomeSpace,
    TokenId,
    apportion,
    ledger_transfer,
    partition_assign,
)

# (agent, event_id, omega, tokens) -> reported label, or None for no response.
ReporterInterface = Callable[[AgentId, str, OutcomeSpace, FrozenSet[TokenId]], Optional[str]]

PUNISH_FALSE = "PunishFalse"
PUNISH_TRUE = "PunishTrue"

# Either a named punishment or a callable picking the surviving tokens.
PunishPolicy = Union[str, Callable[[OmegaPartition, str], FrozenSet[TokenId]]]


class OracleDead(ModelError):
    """The reporting pool is empty; no further queries can be answered."""


def report(
    agent: AgentId,
    event: str,
    omega: OutcomeSpace,
    tokens: Iterable[TokenId],
    iface: ReporterInterface,
    ledger: Ledger,
) -> Tuple[str, FrozenSet[TokenId]]:
    """Ask ``agent`` for an answer; returns (label or Abstain, agent's tokens in ``tokens``)."""
    held = ledger.holdings(agent, tokens)
    if not held:
        raise ModelError(f"agent {agent!r} owns no tokens in the reporting set")
    if agent == SINK:
        return ABSTAIN, held
    try:
        answer = iface(agent, event, omega, held)
    except TimeoutError:
        answer = None
    if answer is None or answer not in omega:
        return ABSTAIN, held
    return answer, held


def fork(
    event: str,
    omega: OutcomeSpace,
    tokens: Iterable[TokenId],
    iface: ReporterInterface,
    ledger: Ledger,
    order: Optional[Sequence[AgentId]] = None,
) -> OmegaPartition:
    """Poll every owner of ``tokens`` once and bin their holding by answer.

    Owners are polled independently, so ``order`` does not affect the result.
    """
    tokens = frozenset(tokens)
    if not tokens:
        raise ModelError("cannot fork an empty token set")
    owners = list(ledger.owners(tokens))
    if order is not None:
        if sorted(order) != owners:
            raise ModelError("fork order must be a permutation of the token owners")
        owners = list(order)
    partition = OmegaPartition.empty(omega)
    for agent in owners:
        label, held = report(agent, event, omega, tokens, iface, ledger)
        partition = partition_assign(partition, label, held)
    return partition


def pay(
    tokens: Iterable[TokenId],
    fee,
    ledger: Ledger,
    payer: Optional[AgentId] = None,
) -> Ledger:
    """Split ``fee`` pro rata over the owners of ``tokens``.

    With ``payer`` the fee is debited from that agent, otherwise it is booked
    as an external inflow. Burned tokens earn nothing. Mutates and returns ``ledger``.
    """
    tokens = frozenset(t for t in tokens if ledger.owner.get(t) != SINK)
    fee = Fraction(fee)
    if not tokens:
        raise ModelError("cannot pay an empty token set")
    if fee < 0:
        raise ModelError("fee must be non-negative")
    n = len(tokens)
    for agent, held in ledger.owners(tokens).items():
        share = fee * len(held) / n
        if payer is None:
            ledger.credit(agent, share)
        else:
            ledger_transfer(ledger, payer, agent, share)
    return ledger


def plurality_winner(partition: OmegaPartition, rng: random.Random) -> str:
    """Outcome with the largest cell; ties are broken uniformly with ``rng``.

    Abstain is never a candidate.
    """
    sizes = {w: partition.size(w) for w in partition.omega}
    top = max(sizes.values())
    best = [w for w in partition.omega if sizes[w] == top]
    if len(best) == 1:
        return best[0]
    return rng.choice(best)


def _settle(
    stakes: OmegaPartition,
    winner: str,
    ledger: Ledger,
    pot: Fraction,
    burn: Fraction,
) -> Dict[AgentId, Fraction]:
    staked = ledger.owners(stakes.union())
    win_cell = stakes[winner]
    winners = ledger.owners(win_cell)
    payouts = {a: pot * len(held) / len(win_cell) for a, held in winners.items()}

    for agent, held in staked.items():
        ledger.tokens[agent] = ledger.token_balance(agent) - len(held)
    for agent, amount in payouts.items():
        ledger.tokens[agent] = ledger.token_balance(agent) + amount
    if burn:
        ledger.tokens[SINK] = ledger.token_balance(SINK) + burn

    # Token identities follow value as closely as whole tokens allow.
    weights = dict(payouts)
    if burn:
        weights[SINK] = burn
    counts = apportion(len(stakes.union()), weights)
    ids = iter(sorted(stakes.union()))
    for agent in sorted(counts):
        for _ in range(counts[agent]):
            ledger.owner[next(ids)] = agent
    return payouts


def distribute(stakes: OmegaPartition, winner: str, ledger: Ledger) -> Ledger:
    """Pay all staked tokens pro rata to whoever staked on ``winner``."""
    if stakes.size(winner) == 0:
        raise ModelError(f"no stake on winning outcome {winner!r}")
    _settle(stakes, winner, ledger, Fraction(stakes.total()), Fraction(0))
    return ledger


@dataclass(frozen=True)
class QueryRecord:
    index: int
    mechanism: str
    outcome: str
    tentative: Optional[str] = None
    forked: bool = False
    partition: Optional[OmegaPartition] = None
    dispute_rounds: int = 0
    disputers: Tuple[AgentId, ...] = ()
    burned: Fraction = Fraction(0)
    # (round, disputer or None, tentative after the round, stake required)
    round_log: Tuple[Tuple[int, Optional[AgentId], str, int], ...] = ()


@dataclass(frozen=True)
class OracleState:
    """Query counter, the pool for the next query, and past query records."""

    pool: FrozenSet[TokenId]
    counter: int = 0
    history: Tuple[QueryRecord, ...] = field(default_factory=tuple)

    @classmethod
    def genesis(cls, ledger: Ledger) -> "OracleState":
        return cls(pool=frozenset(ledger.owner))

    def advance(self, pool: FrozenSet[TokenId], record: QueryRecord) -> "OracleState":
        return replace(self, pool=frozenset(pool), counter=self.counter + 1,
                       history=self.history + (record,))


def surviving_tokens(partition: OmegaPartition, truth: str, punish: PunishPolicy) -> FrozenSet[TokenId]:
    """Tokens the querier keeps in the pool after a fork."""
    if callable(punish):
        kept = frozenset(punish(partition, truth))
        if not kept <= partition.union():
            raise ModelError("punish policy kept tokens outside the forked set")
        return kept
    if punish == PUNISH_FALSE:
        return partition[truth]
    if punish == PUNISH_TRUE:
        return partition.union() - partition[truth]
    raise ModelError(f"unknown punish policy {punish!r}")


def a0_query(
    state: OracleState,
    event: str,
    omega: OutcomeSpace,
    fee,
    iface: ReporterInterface,
    ledger: Ledger,
    rng: random.Random,
    *,
    querier: Optional[AgentId] = None,
    truth: str,
    punish: PunishPolicy = PUNISH_FALSE,
) -> Tuple[str, OracleState]:
    """Run one query of the fork-every-time oracle.

    The pool used is the one the querier kept after the previous query.
    After the fork the querier, knowing ``truth``, picks which tokens stay.
    """
    pool = state.pool
    if not pool:
        raise OracleDead(f"reporting pool is empty at query {state.counter + 1}")
    if truth not in omega:
        raise ModelError(f"ground truth {truth!r} is not in Omega")
    pay(pool, fee, ledger, payer=querier)
    partition = fork(event, omega, pool, iface, ledger)
    winner = plurality_winner(partition, rng)
    kept = surviving_tokens(partition, truth, punish)
    record = QueryRecord(state.counter + 1, "A0", winner, forked=True, partition=partition)
    return winner, state.advance(kept, record)

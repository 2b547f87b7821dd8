"""Outcome spaces, Omega-partitions and the exact-rational ledger."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Tuple

AgentId = str
TokenId = int

ABSTAIN = "Abstain"
INVALID = "Invalid"
# Unspendable owner for burned stake.
SINK: AgentId = "__sink__"


class ModelError(ValueError):
    """Raised when a primitive is asked to break one of its invariants."""


@dataclass(frozen=True)
class Outcome:
    label: str
    kind: str = "Regular"  # Regular | Invalid | Abstain


@dataclass(frozen=True)
class OutcomeSpace:
    """Finite answer domain for one event. Always holds Invalid, never Abstain."""

    labels: Tuple[str, ...]
    event_id: str = "E"

    def __post_init__(self) -> None:
        if not self.labels:
            raise ModelError("outcome space must not be empty")
        if len(set(self.labels)) != len(self.labels):
            raise ModelError(f"duplicate outcome labels in {self.labels!r}")
        if ABSTAIN in self.labels:
            raise ModelError("outcome space may not contain Abstain")
        if INVALID not in self.labels:
            raise ModelError("outcome space must contain Invalid")

    def __contains__(self, label: object) -> bool:
        return label in self.labels

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def outcomes(self) -> Tuple[Outcome, ...]:
        return tuple(
            Outcome(lab, "Invalid" if lab == INVALID else "Regular") for lab in self.labels
        )

    @property
    def cell_keys(self) -> Tuple[str, ...]:
        """Omega plus Abstain, in a fixed order."""
        return (ABSTAIN,) + self.labels


def make_outcome_space(labels: Iterable[str], event_id: str = "E") -> OutcomeSpace:
    """Build an outcome space from user labels, injecting Invalid if absent.

    Raises ModelError on duplicates or on the reserved Abstain label.
    """
    labels = list(labels)
    if not labels:
        raise ModelError("labels must be non-empty")
    if ABSTAIN in labels:
        raise ModelError(f"label {ABSTAIN!r} is reserved and cannot be an outcome")
    if len(set(labels)) != len(labels):
        dupes = sorted({lab for lab in labels if labels.count(lab) > 1})
        raise ModelError(f"duplicate outcome labels: {dupes}")
    if INVALID not in labels:
        labels.append(INVALID)
    return OutcomeSpace(tuple(labels), event_id)


@dataclass(frozen=True)
class Token:
    id: TokenId
    owner: AgentId


@dataclass
class OmegaPartition:
    """One disjoint token cell per element of Omega plus Abstain."""

    omega: OutcomeSpace
    cells: Dict[str, FrozenSet[TokenId]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for key in self.omega.cell_keys:
            self.cells.setdefault(key, frozenset())
        extra = set(self.cells) - set(self.omega.cell_keys)
        if extra:
            raise ModelError(f"cells keyed outside Omega: {sorted(extra)}")
        self.cells = {k: frozenset(self.cells[k]) for k in self.omega.cell_keys}
        seen: set = set()
        for key, cell in self.cells.items():
            if seen & cell:
                raise ModelError(f"cell {key!r} overlaps another cell")
            seen |= cell

    @classmethod
    def empty(cls, omega: OutcomeSpace) -> "OmegaPartition":
        return cls(omega)

    def __getitem__(self, key: str) -> FrozenSet[TokenId]:
        return self.cells[key]

    def size(self, key: str) -> int:
        return len(self.cells[key])

    def union(self) -> FrozenSet[TokenId]:
        out: FrozenSet[TokenId] = frozenset()
        for cell in self.cells.values():
            out = out | cell
        return out

    def total(self) -> int:
        return sum(len(c) for c in self.cells.values())

    def cell_of(self, token: TokenId) -> Optional[str]:
        for key, cell in self.cells.items():
            if token in cell:
                return key
        return None

    def merged(self, other: "OmegaPartition") -> "OmegaPartition":
        """Cell-wise union; the two partitions must be disjoint."""
        return OmegaPartition(
            self.omega, {k: self.cells[k] | other.cells[k] for k in self.omega.cell_keys}
        )

    def sizes(self) -> Dict[str, int]:
        return {k: len(v) for k, v in self.cells.items()}

    def to_dict(self) -> Dict[str, List[TokenId]]:
        return {k: sorted(v) for k, v in self.cells.items()}


def partition_assign(
    partition: OmegaPartition, key: str, tokens: Iterable[TokenId]
) -> OmegaPartition:
    """Return a new partition with ``tokens`` added to cell ``key``."""
    tokens = frozenset(tokens)
    if key not in partition.cells:
        raise ModelError(f"{key!r} is not a cell of this partition")
    if not tokens:
        return partition
    clash = tokens & partition.union()
    if clash:
        raise ModelError(f"tokens already assigned: {sorted(clash)}")
    cells = dict(partition.cells)
    cells[key] = cells[key] | tokens
    return OmegaPartition(partition.omega, cells)


def is_partition_of(partition: OmegaPartition, tokens: Iterable[TokenId]) -> bool:
    tokens = frozenset(tokens)
    return partition.total() == len(tokens) and partition.union() == tokens


@dataclass
class Ledger:
    """Currency balances, token balances and token identities.

    ``currency`` and ``tokens`` are exact rationals. ``tokens`` is the
    token-denominated value each agent holds; stake settlement pays out
    fractional amounts there. ``owner`` maps each token identity to the agent
    that reports with it. ``external`` accumulates declared external currency
    inflows so that ``sum(currency) == external`` always holds.
    """

    currency: Dict[AgentId, Fraction] = field(default_factory=dict)
    tokens: Dict[AgentId, Fraction] = field(default_factory=dict)
    owner: Dict[TokenId, AgentId] = field(default_factory=dict)
    external: Fraction = Fraction(0)
    genesis_supply: int = 0

    @classmethod
    def genesis(cls, allocation: Mapping[AgentId, int]) -> "Ledger":
        """Mint tokens 0..N-1, handing them out in allocation order."""
        ledger = cls()
        next_id = 0
        for agent, count in allocation.items():
            if count < 0:
                raise ModelError(f"negative genesis allocation for {agent!r}")
            for _ in range(count):
                ledger.owner[next_id] = agent
                next_id += 1
            ledger.tokens[agent] = Fraction(count)
            ledger.currency.setdefault(agent, Fraction(0))
        ledger.genesis_supply = next_id
        return ledger

    def copy(self) -> "Ledger":
        return copy.deepcopy(self)

    def balance(self, agent: AgentId) -> Fraction:
        return self.currency.get(agent, Fraction(0))

    def token_balance(self, agent: AgentId) -> Fraction:
        return self.tokens.get(agent, Fraction(0))

    def holdings(self, agent: AgentId, within: Optional[Iterable[TokenId]] = None) -> FrozenSet[TokenId]:
        pool = self.owner.keys() if within is None else within
        return frozenset(t for t in pool if self.owner.get(t) == agent)

    def owners(self, tokens: Iterable[TokenId]) -> Dict[AgentId, FrozenSet[TokenId]]:
        """Group ``tokens`` by owner, with owners in sorted order."""
        groups: Dict[AgentId, set] = {}
        for t in tokens:
            if t not in self.owner:
                raise ModelError(f"unknown token {t}")
            groups.setdefault(self.owner[t], set()).add(t)
        return {a: frozenset(groups[a]) for a in sorted(groups)}

    def credit(self, agent: AgentId, amount: Fraction) -> None:
        """External currency inflow (benefits, lie proceeds)."""
        amount = Fraction(amount)
        self.currency[agent] = self.balance(agent) + amount
        self.external += amount

    def move_tokens(self, src: AgentId, dst: AgentId, amount: Fraction) -> None:
        amount = Fraction(amount)
        if amount < 0:
            raise ModelError("token amount must be non-negative")
        self.tokens[src] = self.token_balance(src) - amount
        self.tokens[dst] = self.token_balance(dst) + amount

    def total_currency(self) -> Fraction:
        return sum(self.currency.values(), Fraction(0))

    def total_tokens(self) -> Fraction:
        return sum(self.tokens.values(), Fraction(0))

    def burned(self) -> Fraction:
        return self.token_balance(SINK)


def ledger_transfer(ledger: Ledger, src: AgentId, dst: AgentId, amount) -> Ledger:
    """Move currency between agents. Balances may go negative."""
    amount = Fraction(amount)
    if amount < 0:
        raise ModelError(f"transfer amount must be >= 0, got {amount}")
    ledger.currency[src] = ledger.balance(src) - amount
    ledger.currency[dst] = ledger.balance(dst) + amount
    return ledger


def apportion(total: int, weights: Mapping[AgentId, Fraction]) -> Dict[AgentId, int]:
    """Largest-remainder split of ``total`` whole items by exact ``weights``.

    Ties on the remainder go to the lexicographically smaller agent id.
    """
    weight_sum = sum(weights.values(), Fraction(0))
    if total == 0 or weight_sum == 0:
        return {a: 0 for a in weights}
    quotas = {a: Fraction(total) * w / weight_sum for a, w in weights.items()}
    out = {a: int(q) for a, q in quotas.items()}  # floor for q >= 0
    left = total - sum(out.values())
    order = sorted(quotas, key=lambda a: (-(quotas[a] - out[a]), a))
    for a in order[:left]:
        out[a] += 1
    return out

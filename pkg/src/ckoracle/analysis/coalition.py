"""Cost of buying silence from every holder able to dispute a false tentative outcome."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import NamedTuple, Sequence

from ..core import Ledger, OmegaPartition, make_outcome_space, partition_assign
from ..dispute import settle_with_roi
from .params import to_fraction

MAX_HOLDERS = 20


class Threshold(NamedTuple):
    min_bribe_total: Fraction
    safe: bool


def coalition_threshold(I, a, d, k: int, n_holders: int) -> Threshold:
    """Bribing n holders out of round k costs a * 2^k * d each; safe iff that exceeds I."""
    I, a, d = map(to_fraction, (I, a, d))
    if k < 1:
        raise ValueError("round index k must be >= 1")
    unit = a * 2 ** k * d
    return Threshold(unit * n_holders, I / unit < n_holders)


def dispute_reward(a, d, k: int) -> Fraction:
    """Net tokens a holder earns by winning a round-k dispute, measured by running the settlement.

    The dispute is settled against an equal losing stake so the burn is positive.
    """
    a, d = to_fraction(a), to_fraction(d)
    bond = 2 ** k * d
    if bond.denominator != 1:
        raise ValueError("bond must be a whole number of tokens")
    bond = int(bond)
    omega = make_outcome_space(["T", "F"])
    ledger = Ledger.genesis({"disputer": bond, "loser": bond})
    stakes = partition_assign(OmegaPartition.empty(omega), "T", range(bond))
    stakes = partition_assign(stakes, "F", range(bond, 2 * bond))
    settle_with_roi(stakes, "T", ledger, a)
    return ledger.token_balance("disputer") - bond


def bribe_search(I, a, d, k: int, holder_stakes: Sequence) -> Fraction:
    """Best coalition profit from a false tentative outcome surviving round k.

    Enumerates every choice of which eligible holders to pay their reservation
    reward. Silence needs all of them paid; otherwise the attempt is worth -inf.
    """
    if len(holder_stakes) > MAX_HOLDERS:
        raise ValueError(f"at most {MAX_HOLDERS} holders supported, got {len(holder_stakes)}")
    I = to_fraction(I)
    bond = 2 ** k * to_fraction(d)
    eligible = [s for s in map(to_fraction, holder_stakes) if s >= bond]
    reservation = dispute_reward(a, d, k)
    best = float("-inf")
    for bribes in itertools.product((Fraction(0), reservation), repeat=len(eligible)):
        if any(b < reservation for b in bribes):
            continue  # an unpaid holder disputes and the lie fails
        best = max(best, I - sum(bribes, Fraction(0)))
    return best

"""Exact check of the backward-induction argument for escalating dispute sequences."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, NamedTuple, Optional, Sequence, Tuple

from .params import EconomicParams, to_fraction

Sample = Tuple[Fraction, Fraction, Fraction]  # (stake on True, stake on false, q)


class Violation(NamedTuple):
    inequality: str
    round: int
    sample: Optional[Sample]
    lhs: Fraction
    rhs: Fraction


@dataclass
class InductionReport:
    a: Fraction
    d: Fraction
    m_max: int
    checked: int = 0
    violations: List[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def failed(self, name: str) -> bool:
        return any(v.inequality == name for v in self.violations)


def final_round_payoffs(a, d, m: int, stake_true, stake_false, q, tentative_true: bool):
    """(dispute, no dispute) payoffs for a holder in the round that would trigger a fork.

    ``q`` is the chance that someone else disputes when this holder passes.
    """
    a, d, T, F, q = map(to_fraction, (a, d, stake_true, stake_false, q))
    bond = 2 ** m * d
    if tentative_true:
        return a * T - F - bond, a * T - F
    return a * T - F + a * bond, q * (a * T - F) + (1 - q) * (a * F - T)


def step_round_payoffs(a, d, k: int, stake_true, stake_false, tentative_true: bool):
    """(best case for disputing, worst case for passing) in round k-1, given later rounds behave."""
    a, d, T, F = map(to_fraction, (a, d, stake_true, stake_false))
    if tentative_true:
        return a * T - F - 2 ** (k - 1) * d + a * 2 ** k * d, a * T - F
    return a * T - F + a * 2 ** (k - 1) * d, a * T - F


def default_grid(points: int = 100) -> List[Sample]:
    """Deterministic (T, F, q) grid; every fifth point is an F = 0 witness and q spans [0, 1]."""
    grid = []
    for i in range(points):
        T = Fraction(i * 7 % 23, 2)
        F = Fraction(0) if i % 5 == 0 else Fraction(i * 11 % 17, 3)
        q = Fraction(i % 11, 10)
        grid.append((T, F, q))
    return grid


def dispute_sequence_induction_check(
    params: EconomicParams, m_max: int, grid: Optional[Sequence[Sample]] = None
) -> InductionReport:
    """Evaluate the base-case and induction-step inequalities for every round up to ``m_max``.

    Witness inequalities (false tentative) are only checked on samples with no
    stake on the false outcome. ``a`` must lie in (0, 1/2]; the upper endpoint
    is allowed so that its failure can be reported.
    """
    a, d = params.a, params.d
    if not 0 < a <= Fraction(1, 2):
        raise ValueError(f"a must lie in (0, 1/2), got {a}")
    if m_max < 2:
        raise ValueError("m_max must be at least 2")
    grid = [tuple(map(to_fraction, s)) for s in (grid if grid is not None else default_grid())]
    if any(x < 0 for s in grid for x in s[:2]) or any(not 0 <= s[2] <= 1 for s in grid):
        raise ValueError("grid stakes must be non-negative and q in [0, 1]")
    witnesses = [s for s in grid if s[1] == 0]
    if not witnesses:
        raise ValueError("grid must contain an F = 0 witness sample")

    report = InductionReport(a, d, m_max)

    def check(name, m, sample, lhs, rhs):
        report.checked += 1
        if not lhs > rhs:
            report.violations.append(Violation(name, m, sample, lhs, rhs))

    for m in range(1, m_max + 1):
        for s in grid:
            dispute, stay = final_round_payoffs(a, d, m, s[0], s[1], s[2], True)
            check("base-True", m, s, stay, dispute)
        for s in witnesses:
            dispute, stay = final_round_payoffs(a, d, m, s[0], 0, s[2], False)
            check("base-False", m, s, dispute, stay)
    for k in range(2, m_max + 1):
        margin = -(2 ** (k - 1)) * d + a * 2 ** k * d
        check("step-True", k, None, Fraction(0), margin)
        for s in witnesses:
            dispute, stay = step_round_payoffs(a, d, k, s[0], 0, False)
            check("step-False", k, s, dispute, stay)
    return report

"""Economic parameters and the closed-form conditions built on them."""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple


def to_fraction(value) -> Fraction:
    """Exact rational from int, Fraction, "num/den" / decimal string, or float (by its repr)."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as a rational")


@dataclass(frozen=True)
class EconomicParams:
    """Exogenous quantities that drive every payoff formula.

    Currency amounts (I, b, phi) and dispute stakes (d, M) share one unit in
    the dispute analyses; p and p_prime convert pool tokens to currency.
    """

    I: Fraction = Fraction(0)
    p: Fraction = Fraction(1)
    p_prime: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    phi: Fraction = Fraction(0)
    pool_size: Fraction = Fraction(1)
    d: Fraction = Fraction(1)
    M: Fraction = Fraction(2)
    a: Fraction = Fraction(2, 5)
    Y: Fraction = Fraction(1, 10)
    n_freq: Fraction = Fraction(1)
    x: Fraction = Fraction(0)
    shares: Tuple[Fraction, ...] = ()
    lie_benefits: Tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name in ("shares", "lie_benefits"):
                object.__setattr__(self, f.name, tuple(to_fraction(s) for s in v))
            else:
                object.__setattr__(self, f.name, to_fraction(v))
        for name in ("I", "p", "p_prime", "b", "phi", "pool_size", "d", "M", "Y", "n_freq", "x"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.p < self.p_prime:
            raise ValueError("p must be at least p_prime")
        # a = 1/2 is admitted so the boundary can be analysed; mechanisms reject it.
        if not 0 < self.a <= Fraction(1, 2):
            raise ValueError(f"a must lie in (0, 1/2], got {self.a}")
        if self.shares:
            if any(not 0 <= r <= 1 for r in self.shares):
                raise ValueError("shares must lie in [0, 1]")
            if sum(self.shares) != 1:
                raise ValueError("shares must sum to 1")
        if self.lie_benefits and sum(self.lie_benefits) != self.I:
            raise ValueError("lie_benefits must sum to I")

    def with_(self, **changes) -> "EconomicParams":
        return replace(self, **changes)

    @property
    def min_lie_cost(self) -> Fraction:
        """Cheapest way to force a lie: half the pool loses p - p_prime each."""
        return Fraction(1, 2) * (self.p - self.p_prime) * self.pool_size

    def share(self, j: int) -> Fraction:
        return self.shares[j] if self.shares else Fraction(0)


def soundness_check(params: EconomicParams) -> bool:
    """I < (p - p') |T| / 2, exactly."""
    return params.I < Fraction(1, 2) * (params.p - params.p_prime) * params.pool_size


class Tenability(NamedTuple):
    x_min: Fraction
    implied_price: Fraction
    satisfied: bool


def tenability(params: EconomicParams) -> Tenability:
    """Fee fraction needed for fee income alone to price the pool above the soundness bound."""
    if params.Y <= 0:
        raise ValueError("expected yield Y must be positive")
    if params.n_freq < 1:
        raise ValueError("n_freq must be at least one query per year")
    if params.pool_size <= 0:
        raise ValueError("pool_size must be positive")
    x_min = 2 * params.Y / params.n_freq
    price = params.n_freq * params.x * params.I / (params.Y * params.pool_size)
    return Tenability(x_min, price, soundness_check(params.with_(p=price, p_prime=0)))


def individually_rational(params: EconomicParams) -> bool:
    """b > phi together with soundness, which makes every honest-play payoff non-negative."""
    return params.b > params.phi and soundness_check(params)


def honest_payoffs(params: EconomicParams) -> Tuple[Fraction, Fraction]:
    """(reporter bloc, querier) stage payoffs under honest play."""
    return params.phi, params.b - params.phi


def reporter_deviation_ev(q, params: EconomicParams, j: int = 0) -> Tuple[Fraction, Fraction]:
    """Expected payoffs of reporter ``j`` for (reporting True, lying or abstaining).

    ``q`` is the chance the oracle still returns True despite the lie.
    """
    q = to_fraction(q)
    if not 0 <= q <= 1:
        raise ValueError("q must lie in [0, 1]")
    r = params.share(j)
    loss = (params.p - params.p_prime) * r * params.pool_size
    truth = r * params.phi
    caught = r * params.phi - loss
    paid = r * params.phi + 2 * r * params.I - loss
    return truth, q * caught + (1 - q) * paid


def deviation_endpoints(params: EconomicParams, j: int = 0) -> Tuple[Fraction, Fraction, Fraction]:
    """(truth payoff, lie payoff if True still wins, lie payoff if the lie wins).

    Any lie payoff is a convex combination of the last two.
    """
    truth, caught = reporter_deviation_ev(1, params, j)
    _, paid = reporter_deviation_ev(0, params, j)
    return truth, caught, paid

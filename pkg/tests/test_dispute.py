import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import answering
from ckoracle.core import SINK, Ledger, ModelError, OmegaPartition, make_outcome_space, partition_assign
from ckoracle.dispute import (
    a1_query,
    a2_query,
    burn_amount,
    burn_and_distribute,
    choice_by_fork,
    choice_by_fork_prime,
    dispute_round,
    dispute_sequence,
    settle_with_roi,
)
from ckoracle.mechanisms import OracleState

OMEGA = make_outcome_space(["True", "False"])


def never(view):
    return None


def toward(label):
    return lambda view: None if view.tentative == label else label


def flip(view):
    return "False" if view.tentative == "True" else "True"


def stake(**cells):
    p = OmegaPartition.empty(OMEGA)
    for key, toks in cells.items():
        p = partition_assign(p, key, toks)
    return p


def only_rounds(*rounds):
    """Policy that flips the tentative outcome in the listed rounds only."""
    return lambda view: flip(view) if view.round in rounds else None


class TestDisputeRound:
    def setup_method(self):
        self.led = Ledger.genesis({"q": 1, "a": 5, "b": 5})
        self.pool = frozenset(range(11))
        self.D = stake(**{"True": {0}})

    def test_no_dispute_is_identity(self):
        res = dispute_round("E", OMEGA, "True", self.D, 2, {"a": never, "b": never}, self.pool, self.led)
        assert res == ("True", self.D, False, None)

    def test_one_dispute_adds_exact_stake(self):
        res = dispute_round("E", OMEGA, "True", self.D, 2, {"a": toward("False")}, self.pool, self.led)
        assert res.tentative == "False" and res.disputed and res.disputer == "a"
        assert res.stakes.size("False") == 2
        assert self.led.holdings("a") >= res.stakes["False"]

    def test_first_in_priority_wins(self):
        pol = {"a": toward("False"), "b": toward("Invalid")}
        assert dispute_round("E", OMEGA, "True", self.D, 2, pol, self.pool, self.led).disputer == "a"
        res = dispute_round("E", OMEGA, "True", self.D, 2, pol, self.pool, self.led, priority=["b"])
        assert res.disputer == "b" and res.tentative == "Invalid"
        assert res.stakes.size("False") == 0  # a's tokens untouched

    def test_short_of_tokens_skipped(self):
        res = dispute_round("E", OMEGA, "True", self.D, 6, {"a": toward("False")}, self.pool, self.led)
        assert not res.disputed

    def test_disputing_tentative_rejected(self):
        with pytest.raises(ModelError):
            dispute_round("E", OMEGA, "True", self.D, 2, {"a": lambda v: "True"}, self.pool, self.led)

    def test_committed_stake_is_not_free(self):
        D = stake(**{"True": {0}, "False": {1, 2, 3, 4}})
        res = dispute_round("E", OMEGA, "False", D, 2, {"a": toward("True")}, self.pool, self.led)
        assert not res.disputed  # a has only one free token left


class TestDisputeSequence:
    def setup_method(self):
        self.led = Ledger.genesis({"q": 1, "a": 300, "b": 300})
        self.pool = frozenset(range(601))
        self.D = stake(**{"True": {0}})

    def run(self, policies, M=8):
        return dispute_sequence("E", OMEGA, "True", self.D, M, policies, self.pool, self.led)

    def test_no_disputes(self):
        res = self.run({"a": never})
        assert (res.tentative, res.stakes, res.everdisputed, res.bigdispute) == ("True", self.D, False, False)
        assert len(res.rounds) == 1

    def test_always_disputed_reaches_threshold(self):
        res = self.run({"a": flip})
        assert [r[3] for r in res.rounds] == [2, 4, 8]
        assert res.everdisputed and res.bigdispute
        assert res.stakes.total() == 1 + 2 + 4 + 8

    def test_single_dispute_survives(self):
        res = self.run({"a": only_rounds(1)})
        assert (res.tentative, res.everdisputed, res.bigdispute) == ("False", True, False)
        assert len(res.rounds) == 2

    def test_threshold_must_exceed_d(self):
        with pytest.raises(ModelError):
            self.run({"a": never}, M=1)

    @pytest.mark.parametrize("K", range(1, 7))
    def test_stake_schedule(self, K):
        res = self.run({"a": only_rounds(*range(1, K + 1))}, M=1024)
        assert res.stakes.total() == 2 ** (K + 1) - 1
        assert [r[3] for r in res.rounds if r[1]] == [2 ** k for k in range(1, K + 1)]

    @given(st.integers(1, 4), st.integers(2, 300))
    def test_round_count_bound(self, d, M):
        import math
        if M <= d:
            return
        led = Ledger.genesis({"q": d, "a": 2000, "b": 2000})
        D = stake(**{"True": range(d)})
        res = dispute_sequence("E", OMEGA, "True", D, M, {"a": flip}, range(led.genesis_supply), led)
        assert res.bigdispute
        assert len(res.rounds) <= math.ceil(math.log2(M / d)) + 1


class TestBurnAndDistribute:
    def test_forty_percent_roi(self):
        d = 5
        led = Ledger.genesis({"q": d, "x": 2 * d})
        D = stake(**{"True": range(d), "False": range(d, 3 * d)})
        delta = 3 * d - Fraction(7, 5) * 2 * d
        assert delta == Fraction(d, 5)
        burn_and_distribute(delta, D, "False", led)
        assert led.token_balance("x") == Fraction(14 * d, 5)
        assert led.token_balance("x") - 2 * d == Fraction(2, 5) * 2 * d
        assert led.burned() == delta and led.total_tokens() == 3 * d

    def test_refund_boundary(self):
        led = Ledger.genesis({"q": 2, "x": 4})
        D = stake(**{"True": range(2), "False": range(2, 6)})
        burn_and_distribute(2, D, "False", led)
        assert led.token_balance("x") == 4

    def test_three_to_one(self):
        led = Ledger.genesis({"u": 3, "v": 1, "l": 6})
        D = stake(**{"True": range(4), "False": range(4, 10)})
        burn_and_distribute(2, D, "True", led)
        assert led.token_balance("u") == 6 and led.token_balance("v") == 2

    @pytest.mark.parametrize("delta", [0, -1, 10, 11])
    def test_delta_out_of_range(self, delta):
        led = Ledger.genesis({"u": 4, "l": 6})
        with pytest.raises(ModelError):
            burn_and_distribute(delta, stake(**{"True": range(4), "False": range(4, 10)}), "True", led)


class TestChoiceByFork:
    def test_true_wins_and_disputer_collects(self):
        d = 2
        led = Ledger.genesis({"q": d, "x": 2 * d, "h": 10})
        D = stake(**{"False": range(d), "True": range(d, 3 * d)})
        w, part = choice_by_fork("E", OMEGA, range(16), D, answering({}, "True"), led, random.Random(0))
        assert w == "True"
        assert led.token_balance("x") == 3 * d
        assert part["True"] >= D.union()  # all stake lands in the winner's cell

    def test_committed_stake_tips_plurality(self):
        # Free tokens alone favour False 4:3; committed stake turns it to 6:5.
        led = Ledger.genesis({"q": 1, "x": 3, "t": 3, "f": 4})
        D = stake(**{"False": {0}, "True": {1, 2, 3}})
        w, _ = choice_by_fork("E", OMEGA, range(11), D, answering({"t": "True", "f": "False"}), led,
                              random.Random(0))
        assert w == "True"

    def test_all_abstain_stake_decides(self):
        led = Ledger.genesis({"q": 1, "x": 2, "a": 9})
        D = stake(**{"False": {0}, "True": {1, 2}})
        w, _ = choice_by_fork("E", OMEGA, range(12), D, answering({}), led, random.Random(0))
        assert w == "True"

    def test_stake_not_revotable(self):
        # x staked four tokens on True and would vote its last free token False.
        led = Ledger.genesis({"q": 1, "x": 5})
        D = stake(**{"False": {0}, "True": {1, 2, 3, 4}})
        w, part = choice_by_fork("E", OMEGA, range(6), D, answering({"x": "False"}), led, random.Random(0))
        assert w == "True"
        assert part.cell_of(5) == "False" and part.cell_of(1) == "True"


class TestChoiceByForkPrime:
    def run(self, win, lose, omega_answer="True"):
        led = Ledger.genesis({"w": win, "l": lose, "h": 100})
        D = stake(**{"True": range(win), "False": range(win, win + lose)})
        w, part, burned = choice_by_fork_prime("E", OMEGA, range(win + lose + 100), D,
                                               answering({"h": "True"}), led, random.Random(0))
        assert w == "True"
        return led, burned

    def test_five_sevenths_burns_nothing(self):
        led, burned = self.run(5, 2)
        assert burned == 0
        assert led.token_balance("w") == 7  # no burn, still exactly 40% on 5

    def test_two_of_three(self):
        d = 5
        led, burned = self.run(2 * d, d)
        assert led.token_balance("w") == Fraction(14 * d, 5) and burned == Fraction(d, 5)

    def test_two_of_seven(self):
        d = 5
        led, burned = self.run(2 * d, 5 * d)
        assert led.token_balance("w") == Fraction(14 * d, 5) and burned == Fraction(21 * d, 5)

    def test_no_losing_stake_refunds(self):
        led, burned = self.run(4, 0)
        assert burned == 0 and led.token_balance("w") == 4


def a1(tentative, policies, alloc=None, answers=None, fee=3):
    alloc = alloc or {"q": 1, "r": 10, "s": 10}
    led = Ledger.genesis(alloc)
    state = OracleState.genesis(led)
    out, new = a1_query(state, "E", OMEGA, fee, tentative, [0], answering(answers or {}, "True"),
                        policies, led, random.Random(0), querier="q", truth="True")
    return out, state, new, led


class TestA1:
    def test_true_tentative_undisputed(self):
        out, old, new, led = a1("True", {"r": toward("True"), "s": toward("True")})
        assert out == "True" and not new.history[-1].forked and new.pool == old.pool
        assert led.token_balance("q") == 1

    def test_false_tentative_disputed(self):
        out, old, new, led = a1("False", {"r": toward("True")})
        assert out == "True" and new.history[-1].forked
        assert led.token_balance("r") == 10 + 1  # collected the querier's d on a 2d stake
        assert led.token_balance("q") == 0

    def test_false_tentative_unchallenged(self):
        out, *_ = a1("False", {"r": never, "s": never})
        assert out == "False"

    def test_fee_paid(self):
        _, _, _, led = a1("True", {})
        # The querier's own staked token earns its 1/21 share back.
        assert led.balance("q") == -3 + Fraction(3, 21)
        assert led.balance("r") == Fraction(30, 21) and led.total_currency() == 0


def a2(tentative, policies, alloc, M=64, roi=Fraction(2, 5), answers=None, d=1):
    led = Ledger.genesis(alloc)
    state = OracleState.genesis(led)
    out, new = a2_query(state, "E", OMEGA, 0, tentative, range(d), answering(answers or {}, "True"),
                        policies, led, random.Random(0), threshold=M, roi=roi, querier="q", truth="True")
    return out, state, new, led


class TestA2:
    alloc = {"q": 1, "r": 200, "s": 200}

    def test_true_tentative_no_rounds_disputed(self):
        out, old, new, led = a2("True", {"r": toward("True")}, self.alloc)
        assert out == "True" and new.history[-1].disputers == ()
        assert new.pool == old.pool and led.token_balance("q") == 1

    def test_false_tentative_forty_percent(self):
        out, old, new, led = a2("False", {"r": toward("True")}, self.alloc)
        assert out == "True" and new.history[-1].disputers == ("r",)
        assert led.token_balance("r") - 200 == Fraction(2, 5) * 2
        assert new.pool == old.pool

    def test_roi_bounds(self):
        for roi in (0, Fraction(1, 2)):
            with pytest.raises(ModelError):
                a2("True", {}, self.alloc, roi=roi)

    def test_griefing_cost(self):
        alloc = {"g": 2000, "h": 1000}
        pol = {"g": toward("False"), "h": toward("True")}
        out, old, new, led = a2("False", pol, {"q": 1, **alloc}, M=1024,
                                answers={"g": "True", "h": "True"})
        rec = new.history[-1]
        assert rec.forked and rec.dispute_rounds == 10 and out == "True"
        assert rec.burned == 2047 - Fraction(7, 5) * 682
        assert led.token_balance("g") == 2000 - 1364
        assert led.total_tokens() == led.genesis_supply


@settings(max_examples=200, deadline=None)
@given(
    d=st.integers(1, 3),
    k=st.integers(1, 6),
    roi=st.sampled_from([Fraction(1, 10), Fraction(1, 4), Fraction(2, 5), Fraction(49, 100)]),
    false_first=st.booleans(),
    fork_at=st.booleans(),
)
def test_a2_roi_and_conservation(d, k, roi, false_first, fork_at):
    """Random A2 dispute runs: every winning staker earns exactly roi on its winning stake."""
    M = 2 ** (k + 1) * d if not fork_at else 2 ** k * d
    if M <= d:
        return
    alloc = {"q": d, "a": 4 * M, "b": 4 * M, "h": 3}
    tentative = "False" if false_first else "True"
    pol = {"a": only_rounds(*range(1, k + 1, 2)), "b": only_rounds(*range(2, k + 1, 2))}
    led = Ledger.genesis(alloc)
    state = OracleState.genesis(led)
    before = dict(led.tokens)
    out, new = a2_query(state, "E", OMEGA, 1, tentative, range(d), answering({}, "True"), pol, led,
                        random.Random(0), threshold=M, roi=roi, querier="q", truth="True")
    rec = new.history[-1]
    assert led.total_tokens() == led.genesis_supply
    assert led.burned() == rec.burned
    assert set(led.owner) == set(range(led.genesis_supply))
    if rec.burned > 0:
        per = {"q": {tentative: d}}
        for _, who, lab, amt in rec.round_log:
            if who is not None:
                per.setdefault(who, {}).setdefault(lab, 0)
                per[who][lab] += amt
        for agent, by in per.items():
            won = by.get(out, 0)
            lost = sum(v for lab, v in by.items() if lab != out)
            assert led.tokens[agent] - before[agent] == roi * won - lost
    if not rec.forked:
        assert new.pool == state.pool

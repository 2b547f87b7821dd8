import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import answering
from ckoracle.core import ABSTAIN, INVALID, Ledger, ModelError, OmegaPartition, is_partition_of, partition_assign
from ckoracle.mechanisms import (
    PUNISH_FALSE,
    PUNISH_TRUE,
    OracleDead,
    OracleState,
    a0_query,
    distribute,
    fork,
    pay,
    plurality_winner,
    report,
)


def parts(omega, **sizes):
    p = OmegaPartition.empty(omega)
    nxt = 0
    for key, n in sizes.items():
        p = partition_assign(p, key, range(nxt, nxt + n))
        nxt += n
    return p


class TestReport:
    def test_returns_all_owned_tokens(self, omega_ab):
        led = Ledger.genesis({"x": 1, "y": 1, "z": 1})
        led.owner[2] = "x"
        assert report("x", "E", omega_ab, {0, 1, 2}, answering({"x": "A"}), led) == ("A", frozenset({0, 2}))

    def test_timeout_is_abstain(self, omega_ab):
        def slow(*_):
            raise TimeoutError
        led = Ledger.genesis({"x": 2})
        assert report("x", "E", omega_ab, {0, 1}, slow, led) == (ABSTAIN, frozenset({0, 1}))

    def test_out_of_omega_is_abstain(self, omega_ab):
        led = Ledger.genesis({"x": 2})
        assert report("x", "E", omega_ab, {0, 1}, answering({"x": "C"}), led)[0] == ABSTAIN

    def test_no_tokens_rejected(self, omega_ab):
        with pytest.raises(ModelError):
            report("w", "E", omega_ab, {0}, answering({}), Ledger.genesis({"x": 1}))


class TestFork:
    def test_unanimous(self, omega_ab):
        led = Ledger.genesis({"x": 1, "y": 2, "z": 3})
        p = fork("E", omega_ab, range(6), answering({}, "A"), led)
        assert p["A"] == frozenset(range(6))
        assert p.total() == p.size("A")

    def test_split_two_one(self, omega_ab):
        led = Ledger.genesis({"x": 3, "y": 4, "z": 2})
        p = fork("E", omega_ab, range(9), answering({"x": "A", "y": "A", "z": "B"}), led)
        assert (p.size("A"), p.size("B"), p.size(ABSTAIN)) == (7, 2, 0)

    def test_abstaining_owner_of_six(self, omega_ab):
        led = Ledger.genesis({"big": 6, "s": 4})
        p = fork("E", omega_ab, range(10), answering({"s": "A"}), led)
        assert p.size(ABSTAIN) == 6

    def test_empty_rejected(self, omega_ab):
        with pytest.raises(ModelError):
            fork("E", omega_ab, [], answering({}), Ledger.genesis({"x": 1}))

    @settings(max_examples=50)
    @given(st.lists(st.tuples(st.integers(1, 4), st.sampled_from(["A", "B", INVALID, None, "junk"])),
                    min_size=1, max_size=6), st.randoms(use_true_random=False))
    def test_valid_partition_and_order_invariant(self, holders, r):
        from ckoracle.core import make_outcome_space
        omega = make_outcome_space(["A", "B"])
        alloc = {f"a{i}": n for i, (n, _) in enumerate(holders)}
        answers = {f"a{i}": lab for i, (_, lab) in enumerate(holders)}
        led = Ledger.genesis(alloc)
        tokens = range(led.genesis_supply)
        base = fork("E", omega, tokens, answering(answers), led)
        assert is_partition_of(base, tokens)
        order = sorted(alloc)
        r.shuffle(order)
        assert fork("E", omega, tokens, answering(answers), led, order=order) == base


class TestPay:
    def test_pro_rata(self):
        led = Ledger.genesis({"x": 3, "y": 7})
        pay(range(10), 100, led)
        assert led.balance("x") == 30

    def test_zero_fee(self):
        led = Ledger.genesis({"x": 3, "y": 7})
        pay(range(10), 0, led)
        assert led.balance("x") == led.balance("y") == 0

    def test_thirds_exact(self):
        led = Ledger.genesis({"x": 1, "y": 1, "z": 1})
        pay(range(3), 1, led)
        assert all(led.balance(a) == Fraction(1, 3) for a in "xyz")

    def test_empty_rejected(self):
        with pytest.raises(ModelError):
            pay([], 1, Ledger.genesis({"x": 1}))

    def test_payer_is_debited(self):
        led = Ledger.genesis({"x": 2, "y": 2})
        pay(range(4), 8, led, payer="q")
        assert led.balance("q") == -8 and led.total_currency() == 0

    @settings(max_examples=1000, deadline=None)
    @given(st.lists(st.integers(1, 50), min_size=1, max_size=8),
           st.fractions(min_value=0, max_value=10 ** 6))
    def test_conserves_fee(self, counts, fee):
        led = Ledger.genesis({f"a{i}": c for i, c in enumerate(counts)})
        pay(range(led.genesis_supply), fee, led)
        assert led.total_currency() == fee
        n = sum(counts)
        for i, c in enumerate(counts):
            assert led.balance(f"a{i}") == fee * c / n


class TestPlurality:
    def test_largest(self, omega_ab, rng):
        assert plurality_winner(parts(omega_ab, A=5, B=3), rng) == "A"

    def test_abstain_never_wins(self, omega_ab, rng):
        assert plurality_winner(parts(omega_ab, Abstain=9, A=1), rng) == "A"

    def test_all_empty_still_picks_from_omega(self, omega_ab, rng):
        assert plurality_winner(OmegaPartition.empty(omega_ab), rng) in omega_ab

    def test_tie_is_uniform(self, omega_ab):
        r = random.Random(20240601)
        p = parts(omega_ab, A=2, B=2)
        wins = sum(plurality_winner(p, r) == "A" for _ in range(10_000))
        # Two-way tie; Invalid is empty so it never wins.
        assert 0.48 <= wins / 10_000 <= 0.52

    @given(st.dictionaries(st.sampled_from(["A", "B", INVALID, ABSTAIN]), st.integers(0, 6)),
           st.integers(0, 2 ** 32))
    def test_argmax(self, sizes, seed):
        from ckoracle.core import make_outcome_space
        omega = make_outcome_space(["A", "B"])
        p = parts(omega, **sizes)
        w = plurality_winner(p, random.Random(seed))
        assert w != ABSTAIN
        assert all(p.size(w) >= p.size(g) for g in omega)


class TestDistribute:
    def test_single_winner_takes_all(self, omega_ab):
        led = Ledger.genesis({"w": 2, "l": 1})
        stakes = partition_assign(partition_assign(OmegaPartition.empty(omega_ab), "A", {0, 1}), "B", {2})
        distribute(stakes, "A", led)
        assert led.token_balance("w") == 3 and led.token_balance("l") == 0
        assert set(led.owner.values()) == {"w"}

    def test_equal_winners_split(self, omega_ab):
        led = Ledger.genesis({"u": 1, "v": 1, "l": 4})
        stakes = partition_assign(partition_assign(OmegaPartition.empty(omega_ab), "A", {0, 1}), "B", range(2, 6))
        distribute(stakes, "A", led)
        assert led.token_balance("u") == led.token_balance("v") == 3

    def test_no_losers_is_refund(self, omega_ab):
        led = Ledger.genesis({"u": 2, "v": 3})
        distribute(partition_assign(OmegaPartition.empty(omega_ab), "A", range(5)), "A", led)
        assert led.tokens == {"u": 2, "v": 3}
        assert led.owner == Ledger.genesis({"u": 2, "v": 3}).owner

    def test_empty_winning_cell_rejected(self, omega_ab):
        with pytest.raises(ModelError):
            distribute(partition_assign(OmegaPartition.empty(omega_ab), "A", {0}), "B",
                       Ledger.genesis({"u": 1}))


class TestA0:
    def run(self, omega, alloc, answers, punish=PUNISH_FALSE, truth="A"):
        led = Ledger.genesis(alloc)
        state = OracleState.genesis(led)
        out, new = a0_query(state, "E1", omega, 10, answering(answers), led, random.Random(0),
                            querier="q", truth=truth, punish=punish)
        return out, state, new, led

    def test_all_truthful_keeps_pool(self, omega_ab):
        out, old, new, led = self.run(omega_ab, {"x": 5, "y": 5}, {"x": "A", "y": "A"})
        assert out == "A" and new.pool == old.pool
        assert led.balance("q") == -10 and led.balance("x") == 5

    def test_forty_percent_liars_ejected(self, omega_ab):
        out, old, new, _ = self.run(omega_ab, {"h": 6, "l": 4}, {"h": "A", "l": "B"})
        assert out == "A"
        assert len(new.pool) == 6 and new.pool < old.pool

    def test_sixty_percent_liars_win(self, omega_ab):
        out, _, new, _ = self.run(omega_ab, {"h": 4, "l": 6}, {"h": "A", "l": "B"})
        assert out == "B"
        assert len(new.pool) == 4  # the querier still keeps the truthful tokens

    def test_punish_true_keeps_liars(self, omega_ab):
        _, _, new, _ = self.run(omega_ab, {"h": 6, "l": 4}, {"h": "A", "l": "B"}, punish=PUNISH_TRUE)
        assert len(new.pool) == 4

    def test_history_grows_with_counter(self, omega_ab):
        _, _, new, _ = self.run(omega_ab, {"h": 1}, {"h": "A"})
        assert new.counter == len(new.history) == 1

    def test_dead_pool(self, omega_ab):
        led = Ledger.genesis({"h": 1})
        with pytest.raises(OracleDead):
            a0_query(OracleState(frozenset()), "E", omega_ab, 1, answering({}), led, random.Random(0),
                     truth="A")

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.integers(1, 5), st.sampled_from(["A", "B", None])), min_size=1, max_size=6))
    def test_pool_monotone(self, holders):
        from ckoracle.core import make_outcome_space
        omega = make_outcome_space(["A", "B"])
        alloc = {f"a{i}": n for i, (n, _) in enumerate(holders)}
        answers = {f"a{i}": lab for i, (_, lab) in enumerate(holders)}
        out, old, new, _ = self.run(omega, alloc, answers)
        assert new.pool <= old.pool
        liars = sum(n for n, lab in holders if lab != "A")
        assert (new.pool == old.pool) == (liars == 0)

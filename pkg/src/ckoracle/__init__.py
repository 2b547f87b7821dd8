"""Exact-arithmetic model of a token-staked oracle with forks, escalating disputes and burns."""

from .core import (
    ABSTAIN,
    INVALID,
    SINK,
    Ledger,
    ModelError,
    OmegaPartition,
    OutcomeSpace,
    ledger_transfer,
    make_outcome_space,
    partition_assign,
)
from .mechanisms import OracleDead, OracleState, a0_query, distribute, fork, pay, plurality_winner, report
from .dispute import (
    a1_query,
    a2_query,
    burn_and_distribute,
    choice_by_fork,
    choice_by_fork_prime,
    dispute_round,
    dispute_sequence,
    settle_with_roi,
)
from .agents import StrategySpec, make_agent
from .harness import InvariantViolation, ScenarioConfig, Trace, run_scenario, sweep

__version__ = "0.1.0"

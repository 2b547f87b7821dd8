from .builders import (
    A0_HONEST,
    BLOC,
    QUERIER,
    REPORTER,
    a1_behaviors,
    build_a0_stage_game,
    build_a1_dispute_game,
    honest_minmax_margins,
)
from .coalition import bribe_search, coalition_threshold, dispute_reward
from .games import (
    Chance,
    Decision,
    EquilibriumResult,
    GameTree,
    Leaf,
    nash_enumerate,
    solve_spe,
    subgame_perfect_by_enumeration,
)
from .induction import (
    InductionReport,
    default_grid,
    dispute_sequence_induction_check,
    final_round_payoffs,
    step_round_payoffs,
)
from .params import (
    EconomicParams,
    deviation_endpoints,
    honest_payoffs,
    individually_rational,
    reporter_deviation_ev,
    soundness_check,
    tenability,
    to_fraction,
)

"""Stage games for the simple oracle and the single-dispute-round oracle."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Mapping

from .games import Chance, Decision, GameTree, Leaf, Profile, as_profile
from .params import EconomicParams, to_fraction

BLOC = "ReporterBloc"
QUERIER = "Querier"
REPORTER = "Reporter"

PF = "PunishFalse"
PT = "PunishTrue"

# (True, (PunishFalse, PunishFalse))
A0_HONEST: Profile = as_profile({"bloc": "True", "querier|True": PF, "querier|False": PF})


def build_a0_stage_game(params: EconomicParams) -> GameTree:
    """Reporters as one bloc pick the oracle's answer, then the querier picks whom to eject.

    The bloc is assumed to reach its chosen answer at minimum cost whatever the
    querier later does: half the pool is punished when the punished side is the
    one the bloc needed, nobody otherwise.
    """
    phi, b, lie = params.phi, params.b, params.I
    cost = params.min_lie_cost

    def leaf(bloc, querier):
        return Leaf({BLOC: bloc, QUERIER: querier})

    true_branch = Decision("querier|True", QUERIER, (
        (PF, leaf(phi, b - phi)),
        (PT, leaf(phi - cost, b - phi)),
    ))
    false_branch = Decision("querier|False", QUERIER, (
        (PF, leaf(phi + lie - cost, -phi - lie)),
        (PT, leaf(phi + lie, -phi - lie)),
    ))
    root = Decision("bloc", BLOC, (("True", true_branch), ("False", false_branch)))
    return GameTree("a0-stage", (BLOC, QUERIER), root, notes=(
        "bloc reaches its chosen outcome at minimum cost regardless of the querier's move",
    ))


def build_a1_dispute_game(
    params: EconomicParams,
    honest_fork: bool = True,
    *,
    others_dispute=Fraction(1, 2),
    fork_truth=Fraction(1, 2),
    reporter: int = 0,
) -> GameTree:
    """Querier picks the tentative outcome, one reporter decides whether to dispute.

    Everyone else's dispute decision is a chance move with probability
    ``others_dispute``. Under ``honest_fork`` every fork pays as if True won;
    otherwise a fork is a chance move that True wins with ``fork_truth``.
    Stake is d on the tentative outcome and 2d on a dispute; the winning side
    collects the losing stake. The querier gains b when True is returned and I
    when a false outcome is.
    """
    others = to_fraction(others_dispute)
    truth_p = to_fraction(fork_truth)
    d = params.d
    fee = params.share(reporter) * params.phi
    phi, b, lie = params.phi, params.b, params.I

    def leaf(q, r):
        return Leaf({QUERIER: -phi + q, REPORTER: fee + r})

    def fork(node_id, true_wins: Leaf, false_wins: Leaf):
        if honest_fork:
            return true_wins
        return Chance(node_id, (("True", truth_p, true_wins), ("False", 1 - truth_p, false_wins)))

    # True tentative; a dispute stakes 2d on a false outcome.
    own_fork = fork("fork|True|reporter", leaf(b + 2 * d, -2 * d), leaf(lie - d, d))
    other_fork = fork("fork|True|others", leaf(b + 2 * d, 0), leaf(lie - d, 0))
    true_node = Decision("reporter|True", REPORTER, (
        ("Dispute", own_fork),
        ("NoDispute", Chance("others|True", (
            ("Dispute", others, other_fork),
            ("Pass", 1 - others, leaf(b, 0)),
        ))),
    ))

    # False tentative; a dispute stakes 2d on True.
    own_fork = fork("fork|False|reporter", leaf(b - d, d), leaf(lie + 2 * d, -2 * d))
    other_fork = fork("fork|False|others", leaf(b - d, 0), leaf(lie + 2 * d, 0))
    false_node = Decision("reporter|False", REPORTER, (
        ("Dispute", own_fork),
        ("NoDispute", Chance("others|False", (
            ("Dispute", others, other_fork),
            ("Pass", 1 - others, leaf(lie, 0)),
        ))),
    ))
    root = Decision("querier", QUERIER, (("TrueTentative", true_node), ("FalseTentative", false_node)))
    return GameTree("a1-dispute", (QUERIER, REPORTER), root, notes=(
        "honest fork continuation" if honest_fork else "fork outcome is a chance move",
        "stake amounts are valued one-for-one with currency",
    ))


def a1_behaviors(profile: Profile) -> Dict[str, bool]:
    """The three equilibrium behaviours expected of the dispute-round game."""
    moves = dict(profile)
    return {
        "querier_submits_true": moves.get("querier") == "TrueTentative",
        "true_tentative_not_disputed": moves.get("reporter|True") == "NoDispute",
        "false_tentative_disputed": moves.get("reporter|False") == "Dispute",
    }


def honest_minmax_margins(params: EconomicParams, minmax: Mapping[str, Fraction]) -> Dict[str, Fraction]:
    """Honest-play stage payoff minus minmax, per player of the A0 stage game."""
    return {BLOC: params.phi - minmax[BLOC], QUERIER: params.b - params.phi - minmax[QUERIER]}

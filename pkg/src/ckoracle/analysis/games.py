"""Finite perfect-information game trees and exact pure-strategy solvers."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

Payoffs = Dict[str, Fraction]
Profile = Tuple[Tuple[str, str], ...]  # sorted (node id, move) pairs


@dataclass(frozen=True)
class Leaf:
    payoffs: Mapping[str, Fraction]


@dataclass(frozen=True)
class Decision:
    id: str
    player: str
    moves: Tuple[Tuple[str, "Node"], ...]
    # Nodes sharing an infoset must be played alike; only the normal-form tools accept them.
    infoset: Optional[str] = None

    @property
    def key(self) -> str:
        return self.infoset or self.id


@dataclass(frozen=True)
class Chance:
    id: str
    branches: Tuple[Tuple[str, Fraction, "Node"], ...]


Node = Union[Leaf, Decision, Chance]


class GameError(ValueError):
    pass


@dataclass
class GameTree:
    name: str
    players: Tuple[str, ...]
    root: Node
    notes: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        ids = set()
        for node in self.nodes():
            if isinstance(node, Leaf):
                missing = set(self.players) - set(node.payoffs)
                if missing:
                    raise GameError(f"leaf lacks payoffs for {sorted(missing)}")
                continue
            if node.id in ids:
                raise GameError(f"duplicate node id {node.id!r}")
            ids.add(node.id)
            if isinstance(node, Chance):
                if any(p < 0 for _, p, _ in node.branches):
                    raise GameError(f"negative probability at {node.id!r}")
                if sum(p for _, p, _ in node.branches) != 1:
                    raise GameError(f"chance probabilities at {node.id!r} do not sum to 1")
            elif not node.moves:
                raise GameError(f"decision node {node.id!r} has no moves")
            elif node.player not in self.players:
                raise GameError(f"unknown player {node.player!r}")
        seen: Dict[str, Decision] = {}
        for node in self.decision_nodes():
            first = seen.setdefault(node.key, node)
            if first.player != node.player or [m for m, _ in first.moves] != [m for m, _ in node.moves]:
                raise GameError(f"information set {node.key!r} mixes players or move labels")

    def nodes(self) -> Iterator[Node]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            if isinstance(node, Decision):
                stack.extend(child for _, child in reversed(node.moves))
            elif isinstance(node, Chance):
                stack.extend(child for _, _, child in reversed(node.branches))

    def decision_nodes(self) -> List[Decision]:
        return sorted((n for n in self.nodes() if isinstance(n, Decision)), key=lambda n: n.id)

    def choice_points(self) -> List[Decision]:
        """One representative decision node per information set, sorted by key."""
        points: Dict[str, Decision] = {}
        for node in self.decision_nodes():
            points.setdefault(node.key, node)
        return [points[k] for k in sorted(points)]

    @property
    def perfect_information(self) -> bool:
        return all(n.infoset is None for n in self.decision_nodes())

    def leaves(self) -> List[Leaf]:
        return [n for n in self.nodes() if isinstance(n, Leaf)]

    def profile_count(self) -> int:
        count = 1
        for node in self.choice_points():
            count *= len(node.moves)
        return count


def evaluate(node: Node, profile: Mapping[str, str]) -> Payoffs:
    """Expected payoffs from ``node`` when every decision follows ``profile``."""
    if isinstance(node, Leaf):
        return dict(node.payoffs)
    if isinstance(node, Decision):
        return evaluate(dict(node.moves)[profile[node.key]], profile)
    total: Payoffs = {}
    for _, prob, child in node.branches:
        for player, v in evaluate(child, profile).items():
            total[player] = total.get(player, Fraction(0)) + prob * v
    return total


def as_profile(mapping: Mapping[str, str]) -> Profile:
    return tuple(sorted(mapping.items()))


@dataclass
class EquilibriumResult:
    spe_profiles: List[Profile] = field(default_factory=list)
    nash_profiles: List[Profile] = field(default_factory=list)
    payoffs: Dict[Profile, Payoffs] = field(default_factory=dict)
    minmax: Dict[str, Fraction] = field(default_factory=dict)
    pareto: Dict[Profile, bool] = field(default_factory=dict)

    @property
    def unique_spe(self) -> bool:
        return len(self.spe_profiles) == 1


def _backward(node: Node) -> List[Tuple[Dict[str, str], Payoffs]]:
    if isinstance(node, Leaf):
        return [({}, dict(node.payoffs))]
    if isinstance(node, Chance):
        out = []
        for combo in itertools.product(*(_backward(child) for _, _, child in node.branches)):
            plan: Dict[str, str] = {}
            value: Payoffs = {}
            for (_, prob, _), (sub, pay) in zip(node.branches, combo):
                plan.update(sub)
                for player, v in pay.items():
                    value[player] = value.get(player, Fraction(0)) + prob * v
            out.append((plan, value))
        return out
    out = []
    for combo in itertools.product(*(_backward(child) for _, child in node.moves)):
        plan = {}
        for sub, _ in combo:
            plan.update(sub)
        best = max(pay[node.player] for _, pay in combo)
        for (move, _), (_, pay) in zip(node.moves, combo):
            if pay[node.player] == best:
                out.append(({**plan, node.id: move}, pay))
    return out


def solve_spe(game: GameTree) -> EquilibriumResult:
    """Backward induction keeping every maximising move, so all pure SPE are listed."""
    if not game.perfect_information:
        raise GameError("backward induction needs perfect information")
    result = EquilibriumResult()
    for plan, pay in _backward(game.root):
        prof = as_profile(plan)
        if prof not in result.payoffs:
            result.spe_profiles.append(prof)
            result.payoffs[prof] = pay
    return result


def _strategy_space(game: GameTree, player: str) -> Tuple[List[str], List[Tuple[str, ...]]]:
    nodes = [n for n in game.choice_points() if n.player == player]
    ids = [n.key for n in nodes]
    return ids, list(itertools.product(*([m for m, _ in n.moves] for n in nodes)))


def normal_form(game: GameTree, limit: int = 10 ** 6) -> Dict[Profile, Payoffs]:
    """Payoffs of every pure strategy profile."""
    if game.profile_count() > limit:
        raise GameError(f"{game.profile_count()} pure profiles exceeds the limit of {limit}")
    nodes = game.choice_points()
    ids = [n.key for n in nodes]
    table = {}
    for moves in itertools.product(*([m for m, _ in n.moves] for n in nodes)):
        prof = dict(zip(ids, moves))
        table[as_profile(prof)] = evaluate(game.root, prof)
    return table


def _pareto_front(vectors: Sequence[Tuple[Fraction, ...]]) -> set:
    front = set()
    for v in vectors:
        dominated = any(
            all(w_i >= v_i for w_i, v_i in zip(w, v)) and any(w_i > v_i for w_i, v_i in zip(w, v))
            for w in vectors
        )
        if not dominated:
            front.add(v)
    return front


def nash_enumerate(game: GameTree, limit: int = 10 ** 6) -> EquilibriumResult:
    """Exhaustive pure Nash check on the induced normal form, plus pure minmax values."""
    table = normal_form(game, limit)
    result = EquilibriumResult(payoffs=dict(table))
    spaces = {p: _strategy_space(game, p) for p in game.players}

    def swap(prof: Profile, ids: List[str], moves: Tuple[str, ...]) -> Profile:
        d = dict(prof)
        d.update(zip(ids, moves))
        return as_profile(d)

    for prof, pay in table.items():
        stable = True
        for player, (ids, strategies) in spaces.items():
            if any(table[swap(prof, ids, s)][player] > pay[player] for s in strategies):
                stable = False
                break
        if stable:
            result.nash_profiles.append(prof)

    for player, (ids, _) in spaces.items():
        # Group profiles by what everyone else does; the player best-responds within a group.
        groups: Dict[Profile, Fraction] = {}
        for prof, pay in table.items():
            others = tuple(kv for kv in prof if kv[0] not in ids)
            if others not in groups or pay[player] > groups[others]:
                groups[others] = pay[player]
        result.minmax[player] = min(groups.values())

    vectors = {prof: tuple(pay[p] for p in game.players) for prof, pay in table.items()}
    front = _pareto_front(list(set(vectors.values())))
    result.pareto = {prof: vec in front for prof, vec in vectors.items()}
    return result


def subgame_perfect_by_enumeration(game: GameTree, limit: int = 10 ** 6) -> List[Profile]:
    """Profiles that are Nash in every subgame, found by brute force.

    Independent of ``solve_spe``: no induction, just deviation checks at every
    decision node's subtree over all pure profiles.
    """
    if not game.perfect_information:
        raise GameError("subgame check needs perfect information")
    if game.profile_count() > limit:
        raise GameError("game too large for brute-force subgame check")
    nodes = game.decision_nodes()
    ids = [n.id for n in nodes]
    found = []
    all_moves = [[m for m, _ in n.moves] for n in nodes]
    for moves in itertools.product(*all_moves):
        prof = dict(zip(ids, moves))
        ok = True
        for root in nodes:
            sub = GameTree(game.name, game.players, root)
            base = evaluate(root, prof)
            for player in game.players:
                pnodes = [n for n in sub.decision_nodes() if n.player == player]
                for alt in itertools.product(*([m for m, _ in n.moves] for n in pnodes)):
                    trial = dict(prof)
                    trial.update(zip((n.id for n in pnodes), alt))
                    if evaluate(root, trial)[player] > base[player]:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            found.append(as_profile(prof))
    return found


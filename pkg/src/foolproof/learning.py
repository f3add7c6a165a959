"""Tabular value storage, visit-count learning rates, the shared seeded
exploration process, and the five Q-update rules (selfish, minimax,
cooperative, retaliation, defection).

All updates bootstrap 0 across stage boundaries: values never leak from one
stage game into the next.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .games import ContractViolation, GameSpec, Transition
from .solvers import matrix_view, solve_maxmin, unravel_joint

__all__ = [
    "ExplorationProcess",
    "LearningParams",
    "QTable",
    "VisitCounter",
    "coop_partner_actions",
    "defection_value",
    "explore_now",
    "q_update_cooperative",
    "q_update_defection",
    "q_update_minimax",
    "q_update_retaliation",
    "q_update_selfish",
    "visit_learning_rate",
]


@dataclass
class LearningParams:
    gamma: float = 1.0
    retaliation_bonus: int = 1

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma <= 1.0:
            raise ContractViolation("gamma must lie in [0, 1]")


class QTable:
    """Dense state x joint-action value table.

    ``owner`` names the role: ("cooperative", None), ("retaliation", j),
    ("defection", j) or ("selfish", i).  Selfish tables are keyed on the
    player's own action only, so their action_counts collapse to one axis.
    """

    def __init__(self, num_states: int, action_counts: tuple[int, ...],
                 owner=("cooperative", None)):
        self.action_counts = tuple(action_counts)
        self.num_actions = int(np.prod(self.action_counts))
        self.values = np.zeros((num_states, self.num_actions))
        self.owner = owner

    @classmethod
    def for_game(cls, game: GameSpec, owner=("cooperative", None)) -> "QTable":
        kind, who = owner
        if kind == "selfish":
            return cls(game.num_states, (game.action_counts[who],), owner)
        return cls(game.num_states, game.action_counts, owner)

    def copy(self) -> "QTable":
        out = QTable(self.values.shape[0], self.action_counts, self.owner)
        out.values[:] = self.values
        return out

    def check_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))


class VisitCounter:
    """Visit counts backing the 1/n learning rate.

    Counts are kept per state by default (the per-state rule) or per
    state/action pair when ``per_action`` entries are recorded.
    """

    def __init__(self, num_states: int, num_actions: int | None = None):
        if num_actions is None:
            self.counts = np.zeros(num_states, dtype=np.int64)
        else:
            self.counts = np.zeros((num_states, num_actions), dtype=np.int64)

    def record(self, s: int, a: int | None = None) -> int:
        if a is None:
            self.counts[s] += 1
            return int(self.counts[s])
        self.counts[s, a] += 1
        return int(self.counts[s, a])

    def count(self, s: int, a: int | None = None) -> int:
        return int(self.counts[s] if a is None else self.counts[s, a])


def visit_learning_rate(counter: VisitCounter, s: int,
                        a: int | None = None) -> float:
    """alpha = 1 / (visits so far, including the current one)."""
    n = counter.count(s, a)
    if n <= 0:
        raise ContractViolation("learning rate queried before any visit")
    return 1.0 / n


class ExplorationProcess:
    """Deterministic seeded exploration: step t explores iff X_t < eps * d^t.

    Replicas built with the same (seed, epsilon, decay) reproduce every
    decision and every uniform draw, which is what lets a team explore
    jointly and excuse those deviations.
    """

    def __init__(self, epsilon: float, decay: float, seed: int):
        if not 0.0 <= epsilon <= 1.0:
            raise ContractViolation("epsilon must lie in [0, 1]")
        if not 0.0 < decay <= 1.0:
            raise ContractViolation("decay must lie in (0, 1]")
        self.epsilon = epsilon
        self.decay = decay
        self.seed = seed
        self.t = 0
        self._threshold = epsilon
        self._rng = np.random.Generator(np.random.PCG64(seed))

    def next_decision(self, t: int) -> bool:
        if t != self.t:
            raise ContractViolation(
                f"exploration decisions must be drawn in order (expected "
                f"{self.t}, got {t})")
        x = self._rng.random()
        explore = x < self._threshold
        self.t += 1
        self._threshold *= self.decay
        return explore

    def draw_uniform_joint(self, action_counts) -> tuple[int, ...]:
        return tuple(int(self._rng.integers(n)) for n in action_counts)

    def draw_index(self, probs: np.ndarray) -> int:
        u = self._rng.random()
        return int(min(np.searchsorted(np.cumsum(probs), u, side="right"),
                       len(probs) - 1))


def explore_now(proc: ExplorationProcess, t: int) -> bool:
    return proc.next_decision(t)


# ---------------------------------------------------------------------------
# Update rules.  Each takes the observed transition, a learning rate and a
# discount; the bootstrap term is 0 whenever the transition ends the stage.


def _td(q: QTable, s: int, a_idx: int, target: float, alpha: float) -> None:
    q.values[s, a_idx] += alpha * (target - q.values[s, a_idx])


def q_update_selfish(q: QTable, trans: Transition, alpha: float,
                     gamma: float) -> None:
    """Independent Q-learning on the player's own action, opponents treated
    as part of the environment."""
    kind, player = q.owner
    if kind != "selfish":
        raise ContractViolation("selfish update needs a selfish table")
    a = trans.actions[player]
    boot = 0.0 if trans.stage_end else float(q.values[trans.next_state].max())
    _td(q, trans.state, a, float(trans.rewards[player]) + gamma * boot, alpha)


def q_update_minimax(q: QTable, trans: Transition, alpha: float,
                     gamma: float, focal: int) -> None:
    """Defensive update: bootstrap with the focal player's mixed max-min
    over the opponents' joint actions (linear program)."""
    ja = _joint_index(q, trans.actions)
    if trans.stage_end:
        boot = 0.0
    else:
        view = matrix_view(q.values[trans.next_state], focal, q.action_counts)
        if view.shape[1] == 1:
            boot = float(view.max())
        else:
            _strategy, boot = solve_maxmin(view)
    _td(q, trans.state, ja, float(trans.rewards[focal]) + gamma * boot, alpha)


def q_update_cooperative(q: QTable, trans: Transition, alpha: float,
                         gamma: float) -> None:
    """Joint-MDP update on the sum of all players' rewards."""
    ja = _joint_index(q, trans.actions)
    boot = 0.0 if trans.stage_end else float(q.values[trans.next_state].max())
    _td(q, trans.state, ja, float(trans.rewards.sum()) + gamma * boot, alpha)


def q_update_retaliation(q: QTable, trans: Transition, alpha: float,
                         gamma: float) -> None:
    """Team-defense update against the table's designated player j: the
    bootstrap is j's best pure action against the worst pure team reply
    (the inner minimum of a linear functional sits at a pure joint action)."""
    kind, j = q.owner
    if kind != "retaliation":
        raise ContractViolation("retaliation update needs a retaliation table")
    ja = _joint_index(q, trans.actions)
    if trans.stage_end:
        boot = 0.0
    else:
        view = matrix_view(q.values[trans.next_state], j, q.action_counts)
        boot = float(view.min(axis=1).max())
    _td(q, trans.state, ja, float(trans.rewards[j]) + gamma * boot, alpha)


def coop_partner_actions(qc: QTable, s: int) -> tuple[int, ...]:
    """The joint greedy profile of the cooperative table at s."""
    idx = int(qc.values[s].argmax())
    return unravel_joint(idx, qc.action_counts)


def defection_value(qd: QTable, qc: QTable, s: int) -> float:
    """Best payoff of the table's player j at s when everyone else plays the
    cooperative greedy profile."""
    _kind, j = qd.owner
    coop = coop_partner_actions(qc, s)
    view = np.asarray(qd.values[s]).reshape(qd.action_counts)
    index = list(coop)
    index[j] = slice(None)
    return float(view[tuple(index)].max())


def q_update_defection(qd: QTable, qc: QTable, trans: Transition, alpha: float,
                       gamma: float) -> None:
    """Tracks player j's best-response payoff against the cooperative
    profile; uses j's own reward as the immediate term."""
    kind, j = qd.owner
    if kind != "defection":
        raise ContractViolation("defection update needs a defection table")
    ja = _joint_index(qd, trans.actions)
    boot = 0.0 if trans.stage_end else defection_value(qd, qc, trans.next_state)
    _td(qd, trans.state, ja, float(trans.rewards[j]) + gamma * boot, alpha)


def _joint_index(q: QTable, actions) -> int:
    idx = 0
    for n, a in zip(q.action_counts, actions):
        idx = idx * n + a
    return idx

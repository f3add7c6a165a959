"""The foolproof cooperative learner.

Each player keeps 2N+1 value functions: one cooperative table shared in
content with its teammates, and per-opponent retaliation and defection
tables.  Play follows the cycled egalitarian schedule derived from the
cooperative table, explores at deterministic shared times, and punishes a
detected defector with the team minimax profile for a sufficient number of
stage games.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .games import (
    ContractViolation,
    GameSpec,
    Transition,
    cyclic_permutation,
    permutation_power,
)
from .learning import (
    ExplorationProcess,
    LearningParams,
    QTable,
    VisitCounter,
    coop_partner_actions,
    defection_value,
    q_update_cooperative,
    q_update_defection,
    q_update_retaliation,
)
from .solvers import matrix_view, solve_zero_sum, unravel_joint

__all__ = [
    "UNBOUNDED",
    "DefectionEvent",
    "FCLAgent",
    "detect_defection",
    "egalitarian_schedule",
    "retaliation_count",
    "retaliation_profile",
]

UNBOUNDED = math.inf
_SADDLE_TOL = 1e-9
_VALUE_GAP_TOL = 1e-6


@dataclass
class DefectionEvent:
    defector: int
    stage_index: int
    state: int
    expected_action: int
    played_action: int


def retaliation_count(vd: float, vc: float, vr: float, bonus: int = 1):
    """Number of punishment stages making a defection unprofitable.

    Returns UNBOUNDED when cooperation and retaliation values coincide (the
    zero-sum edge case, where punishing costs the team nothing).
    """
    if vc < vr - 1e-9:
        raise ContractViolation(
            "cooperative value below retaliation value: broken estimates")
    gap = vc - vr
    if gap <= _VALUE_GAP_TOL:
        return UNBOUNDED
    return max(0, math.ceil((vd - vc) / gap - 1e-12)) + bonus


def egalitarian_schedule(sigma: tuple[int, ...], t: int, coop):
    """Assign each seat the sigma^t-image component of a cooperative joint
    action (identity state/action relabeling)."""
    perm = permutation_power(sigma, t)
    return tuple(coop[perm[i]] for i in range(len(sigma)))


def detect_defection(expected, played, exploring: bool, stage_index: int = 0,
                     state: int = 0, skip=()):
    """Per-player defection events: a non-exploration deviation from the
    expected profile.  Players in ``skip`` (typically the observer itself)
    are never flagged."""
    if exploring:
        return {}
    events = {}
    for j, (e, p) in enumerate(zip(expected, played)):
        if j in skip or e == p:
            continue
        events[j] = DefectionEvent(defector=j, stage_index=stage_index,
                                   state=state, expected_action=e,
                                   played_action=p)
    return events


def retaliation_profile(qr_j: QTable, s: int):
    """Team punishment at s: the minimizing strategy over the team's joint
    actions against the defector's best reply.

    Returns (mixed strategy over team joint actions, value for the
    defector).  When a pure saddle point exists the strategy is the pure
    min-max column, so a learner never mixes without need; otherwise the
    mixed solution of the state's zero-sum matrix game is used (this is what
    holds a best-responder to the game value in cyclic games).
    """
    _kind, j = qr_j.owner
    view = matrix_view(qr_j.values[s], j, qr_j.action_counts)
    lo = float(view.min(axis=1).max())
    maxs = view.max(axis=0)
    col = int(maxs.argmin())
    hi = float(maxs[col])
    if hi - lo <= _SADDLE_TOL:
        strat = np.zeros(view.shape[1])
        strat[col] = 1.0
        return strat, lo
    _rows, cols, value = solve_zero_sum(view)
    return cols, value


class FCLAgent:
    """One seat of a foolproof cooperative team.

    Replicas constructed with the same team seed draw identical exploration
    decisions and identical mixed-retaliation samples, so every teammate
    independently reconstructs the joint behavior without communication at
    run time.
    """

    def __init__(self, game: GameSpec, seat: int, epsilon: float, decay: float,
                 team_seed: int, params: LearningParams | None = None):
        self.game = game
        self.seat = seat
        self.params = params or LearningParams()
        n = game.num_players
        self.qc = QTable.for_game(game, ("cooperative", None))
        self.qr = {j: QTable.for_game(game, ("retaliation", j))
                   for j in range(n) if j != seat}
        self.qd = {j: QTable.for_game(game, ("defection", j))
                   for j in range(n) if j != seat}
        self.visits = VisitCounter(game.num_states, game.num_joint_actions)
        self.explorer = ExplorationProcess(epsilon, decay, team_seed)
        self.sigma = cyclic_permutation(n)
        self.stage_index = 0
        self.step_t = 0
        self.retaliation_target: int | None = None
        self.retaliation_left: float = 0.0
        self._detection_stage: int | None = None
        self._stage_initial: int | None = None
        self.defection_log: list[DefectionEvent] = []
        # schedule isomorphisms for the powers of sigma
        self._isos = []
        self._inv_action_maps = []
        for k in range(n):
            iso = game.isomorphism(permutation_power(self.sigma, k))
            self._isos.append(iso)
            invs = []
            for m in iso.action_maps:
                inv = np.empty_like(m)
                inv[m] = np.arange(len(m))
                invs.append(inv)
            self._inv_action_maps.append(invs)
        self._team_seats = {j: [i for i in range(n) if i != j]
                            for j in range(n)}
        self._team_counts = {j: [game.action_counts[i] for i in seats]
                             for j, seats in self._team_seats.items()}
        self._k_cache: dict[int, tuple[int, float]] = {}
        self._last_explore = False
        self._last_expected: tuple[int, ...] | None = None
        self._last_retal_joint: dict[int, int] = {}

    # -- play ---------------------------------------------------------------

    def act(self, s: int) -> int:
        if self._stage_initial is None:
            self._stage_initial = s
        explore = self.explorer.next_decision(self.step_t)
        self.step_t += 1
        exploration_joint = None
        if explore:
            exploration_joint = self.explorer.draw_uniform_joint(
                self.game.action_counts)
        self._last_explore = explore
        self._last_expected = self._cooperative_joint(s)
        self._last_retal_joint = {}
        if explore:
            # exploration overrides retaliation: the whole team keeps
            # sampling unseen joint actions, so punishment estimates cannot
            # freeze on an optimistic never-visited entry
            return exploration_joint[self.seat]
        if self.retaliation_target is not None:
            j = self.retaliation_target
            team_joint = self._sample_retaliation(s, j)
            self._last_retal_joint[j] = team_joint
            return self._team_component(j, team_joint)
        return self._last_expected[self.seat]

    def _cooperative_joint(self, s: int) -> tuple[int, ...]:
        """Expected cooperative joint action at s for the current stage of
        the egalitarian cycle (through the game's seat isomorphism)."""
        k = self.stage_index % self.game.num_players
        iso = self._isos[k]
        greedy = coop_partner_actions(self.qc, int(iso.state_map[s]))
        joint = tuple(
            int(self._inv_action_maps[k][i][greedy[iso.perm[i]]])
            for i in range(self.game.num_players))
        return joint

    def _sample_retaliation(self, s: int, j: int) -> int:
        strat, _value = retaliation_profile(self.qr[j], s)
        if strat.max() > 1.0 - 1e-12:
            return int(strat.argmax())
        return self.explorer.draw_index(strat)

    def _team_component(self, j: int, team_joint: int) -> int:
        seats = self._team_seats[j]
        actions = unravel_joint(team_joint, self._team_counts[j])
        return actions[seats.index(self.seat)]

    # -- learn --------------------------------------------------------------

    def observe(self, trans: Transition) -> None:
        game = self.game
        ja = game.joint_index(trans.actions)
        self.visits.record(trans.state, ja)
        alpha = 1.0 / self.visits.count(trans.state, ja)
        gamma = self.params.gamma
        q_update_cooperative(self.qc, trans, alpha, gamma)
        for j in self.qr:
            q_update_retaliation(self.qr[j], trans, alpha, gamma)
            q_update_defection(self.qd[j], self.qc, trans, alpha, gamma)
        self._detect_and_arm(trans)
        if trans.stage_end:
            self._end_stage()

    def _detect_and_arm(self, trans: Transition) -> None:
        expected = list(self._last_expected)
        if self.retaliation_target is not None:
            # teammates are executing the shared punishment; the target is
            # still expected to cooperate
            j = self.retaliation_target
            team_joint = self._last_retal_joint.get(j)
            if team_joint is not None:
                seats = self._team_seats[j]
                team_actions = unravel_joint(team_joint, self._team_counts[j])
                for pos, i in enumerate(seats):
                    expected[i] = team_actions[pos]
                expected[j] = self._last_expected[j]
        events = detect_defection(tuple(expected), trans.actions,
                                  self._last_explore,
                                  stage_index=self.stage_index,
                                  state=trans.state, skip=(self.seat,))
        if not events:
            return
        j = min(events)   # deterministic choice if several deviate at once
        self.defection_log.append(events[j])
        self.retaliation_target = j
        self.retaliation_left = self._required_retaliations(j)
        self._detection_stage = self.stage_index

    def _required_retaliations(self, j: int) -> float:
        # the value estimates barely move within one stage game, so the
        # count is computed at most once per (defector, stage)
        cached = self._k_cache.get(j)
        if cached is not None and cached[0] == self.stage_index:
            return cached[1]
        k = self._compute_retaliations(j)
        self._k_cache[j] = (self.stage_index, k)
        return k

    def _compute_retaliations(self, j: int) -> float:
        s0 = self._stage_initial if self._stage_initial is not None else 0
        vc = float(self.qc.values[s0].max()) / self.game.num_players
        vd = defection_value(self.qd[j], self.qc, s0)
        _strat, vr = retaliation_profile(self.qr[j], s0)
        try:
            return retaliation_count(vd, vc, vr,
                                     self.params.retaliation_bonus)
        except ContractViolation:
            # inconsistent early estimates: punish briefly rather than lock in
            return float(self.params.retaliation_bonus)

    def _end_stage(self) -> None:
        if (self.retaliation_target is not None
                and self.stage_index != self._detection_stage):
            if self.retaliation_left != UNBOUNDED:
                self.retaliation_left -= 1
                if self.retaliation_left <= 0:
                    self.retaliation_target = None
                    self._detection_stage = None
        self.stage_index += 1
        self._stage_initial = None

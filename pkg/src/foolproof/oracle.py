"""Exact ground truth for small games by dynamic programming on the joint
MDP: cooperative values, per-defector minimax retaliation values, best-
response defection values, egalitarian cycle values and sufficient
retaliation counts.  This module is the independent reference that the
learned tables are tested against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .games import (
    ContractViolation,
    GameSpec,
    cyclic_permutation,
    expected_returns,
    permutation_power,
    transformed_profile,
)
from .solvers import pure_maxmin, pure_minmax, solve_zero_sum

__all__ = [
    "CapacityError",
    "ExactValues",
    "UNBOUNDED",
    "bellman_residual",
    "egalitarian_check",
    "exact_cooperative_values",
    "exact_defect_value",
    "exact_minimax_values",
    "exact_values",
    "folk_inequality_check",
    "format_report",
]

UNBOUNDED = math.inf
_MAX_PAIRS = 100_000
_VALUE_TIE_TOL = 1e-6


class CapacityError(RuntimeError):
    """Game too large for exact tabulation."""


def _check_capacity(game: GameSpec) -> None:
    if game.num_states * game.num_joint_actions > _MAX_PAIRS:
        raise CapacityError(
            f"{game.num_states} states x {game.num_joint_actions} joint "
            f"actions exceeds the exact-solver capacity")


def _live(game: GameSpec) -> np.ndarray:
    return (~game.absorbing).astype(float)


@dataclass
class CoopSolution:
    q: np.ndarray                 # (S, JA) horizon-limited action values
    greedy: np.ndarray            # (S,) greedy joint-action index
    sum_value: float              # expected stage sum from the initial dist
    player_returns: np.ndarray    # per-player stage returns under greedy


def exact_cooperative_values(game: GameSpec, gamma: float = 1.0) -> CoopSolution:
    """Backward induction on the joint MDP with summed rewards."""
    _check_capacity(game)
    S, JA = game.num_states, game.num_joint_actions
    rsum = game.rewards.sum(axis=2)
    P = game.transitions.reshape(S * JA, S)
    live = _live(game)
    V = np.zeros(S)
    Q = rsum.copy()
    # A second pass with a hair of discounting breaks ties between
    # equal-sum actions toward the one that collects sooner; without it the
    # stationary greedy profile can idle forever on a loop that an optimal
    # nonstationary policy would only traverse part of.
    tb = gamma * (1.0 - 1e-7)
    Vtb = np.zeros(S)
    Qtb = rsum.copy()
    for _ in range(game.max_stage_steps):
        Q = rsum + gamma * (P @ (V * live)).reshape(S, JA)
        V = Q.max(axis=1)
        Qtb = rsum + tb * (P @ (Vtb * live)).reshape(S, JA)
        Vtb = Qtb.max(axis=1)
    greedy = Qtb.argmax(axis=1)
    profile = _deterministic_profile(game, greedy)
    player_returns = expected_returns(game, profile, game.max_stage_steps)
    sum_value = float(game.initial_dist @ V)
    return CoopSolution(q=Q, greedy=greedy, sum_value=sum_value,
                        player_returns=player_returns)


def _deterministic_profile(game: GameSpec, greedy: np.ndarray):
    profile = []
    for i, n in enumerate(game.action_counts):
        pol = np.zeros((game.num_states, n))
        for s in range(game.num_states):
            pol[s, game.joint_actions[int(greedy[s])][i]] = 1.0
        profile.append(pol)
    return profile


@dataclass
class MinimaxSolution:
    value: float                  # defector j's stage value from the start
    state_values: np.ndarray      # (S,)
    team_strategy: list           # per state: mixed over the team's joint actions
    q: np.ndarray                 # (S, JA) action values for j


def exact_minimax_values(game: GameSpec, j: int,
                         gamma: float = 1.0) -> MinimaxSolution:
    """Value of player j when every other player retaliates against it.

    Each sweep solves the per-state zero-sum matrix game between j (rows,
    mixing allowed) and the joint team action (columns); states with a pure
    saddle point skip the linear program.
    """
    _check_capacity(game)
    S, JA = game.num_states, game.num_joint_actions
    P = game.transitions.reshape(S * JA, S)
    rj = game.rewards[:, :, j]
    live = _live(game)
    V = np.zeros(S)
    team_strategy: list = [None] * S
    Q = rj.copy()
    for sweep in range(game.max_stage_steps):
        Q = rj + gamma * (P @ (V * live)).reshape(S, JA)
        last = sweep == game.max_stage_steps - 1
        for s in range(S):
            view = _focal_view(Q[s], j, game.action_counts)
            _row, lo = pure_maxmin(view)
            col, hi = pure_minmax(view)
            if hi - lo <= _VALUE_TIE_TOL:
                V[s] = lo
                if last:
                    strat = np.zeros(view.shape[1])
                    strat[col] = 1.0
                    team_strategy[s] = strat
            else:
                _rows, cols, value = solve_zero_sum(view)
                V[s] = value
                if last:
                    team_strategy[s] = cols
    value = float(game.initial_dist @ V)
    return MinimaxSolution(value=value, state_values=V.copy(),
                           team_strategy=team_strategy, q=Q)


def _focal_view(values: np.ndarray, focal: int,
                counts: tuple[int, ...]) -> np.ndarray:
    arr = values.reshape(counts)
    arr = np.moveaxis(arr, focal, 0)
    return arr.reshape(counts[focal], -1)


@dataclass
class DefectSolution:
    per_cycle_position: np.ndarray   # best-response value per schedule offset
    value: float                     # cycle maximum


def exact_defect_value(game: GameSpec, j: int, gamma: float = 1.0,
                       coop: CoopSolution | None = None) -> DefectSolution:
    """Best payoff j can reach while the others follow the (cycled)
    cooperative profile."""
    _check_capacity(game)
    if coop is None:
        coop = exact_cooperative_values(game, gamma)
    n = game.num_players
    sigma = cyclic_permutation(n)
    base_profile = _deterministic_profile(game, coop.greedy)
    S = game.num_states
    live = _live(game)
    out = np.zeros(n)
    for p in range(n):
        perm = permutation_power(sigma, p)
        prof = transformed_profile(game, base_profile, perm)
        others = [np.argmax(prof[i], axis=1) for i in range(n)]
        aj_count = game.action_counts[j]
        V = np.zeros(S)
        for _ in range(game.max_stage_steps):
            Qj = np.zeros((S, aj_count))
            for s in range(S):
                acts = [int(others[i][s]) for i in range(n)]
                for aj in range(aj_count):
                    acts[j] = aj
                    ja = game.joint_index(acts)
                    Qj[s, aj] = (game.rewards[s, ja, j] + gamma *
                                 float(game.transitions[s, ja] @ (V * live)))
            V = Qj.max(axis=1)
        out[p] = float(game.initial_dist @ V)
    return DefectSolution(per_cycle_position=out, value=float(out.max()))


@dataclass
class EgalitarianReport:
    cycle_average: float
    per_player_averages: np.ndarray
    equal: bool
    best_pure_min: float
    no_pure_profile_beats: bool
    checked_profiles: int


def egalitarian_check(game: GameSpec, gamma: float = 1.0,
                      max_pure_profiles: int = 4096,
                      rng: np.random.Generator | None = None) -> EgalitarianReport:
    """Verify the cycled sum-maximizing profile equalizes stage averages and
    that its minimum is unbeaten by pure stationary profiles (exhaustively
    when the profile space is small, by sampling otherwise)."""
    coop = exact_cooperative_values(game, gamma)
    n = game.num_players
    sigma = cyclic_permutation(n)
    base_profile = _deterministic_profile(game, coop.greedy)
    returns = np.zeros((n, n))
    for p in range(n):
        perm = permutation_power(sigma, p)
        prof = transformed_profile(game, base_profile, perm)
        returns[p] = expected_returns(game, prof, game.max_stage_steps)
    averages = returns.mean(axis=0)
    equal = float(averages.max() - averages.min()) < 1e-9
    cycle_average = float(averages.mean())

    # pure stationary profiles: number of deterministic joint policies
    policy_space = 1.0
    for a in game.action_counts:
        policy_space *= float(a) ** game.num_states
    best_min = -np.inf
    if policy_space <= max_pure_profiles:
        candidates = itertools.product(
            *(itertools.product(range(a), repeat=game.num_states)
              for a in game.action_counts))
        checked = 0
        for cand in candidates:
            prof = [_onehot_policy(game, i, cand[i]) for i in range(n)]
            r = expected_returns(game, prof, game.max_stage_steps)
            best_min = max(best_min, float(r.min()))
            checked += 1
    else:
        rng = rng or np.random.default_rng(0)
        checked = 256
        for _ in range(checked):
            cand = [tuple(rng.integers(a, size=game.num_states))
                    for a in game.action_counts]
            prof = [_onehot_policy(game, i, cand[i]) for i in range(n)]
            r = expected_returns(game, prof, game.max_stage_steps)
            best_min = max(best_min, float(r.min()))
        # always include the sum-maximizing profile itself
        best_min = max(best_min, float(returns.min()))
        checked += 1
    return EgalitarianReport(
        cycle_average=cycle_average,
        per_player_averages=averages,
        equal=equal,
        best_pure_min=best_min,
        no_pure_profile_beats=best_min <= cycle_average + 1e-9,
        checked_profiles=checked,
    )


def _onehot_policy(game: GameSpec, seat: int, actions) -> np.ndarray:
    pol = np.zeros((game.num_states, game.action_counts[seat]))
    pol[np.arange(game.num_states), np.asarray(actions)] = 1.0
    return pol


@dataclass
class ExactValues:
    game: str
    v_cooperate: np.ndarray       # per-player return under the greedy profile
    v_egalitarian: float          # cycle average (equal across players)
    v_retaliate: np.ndarray       # per-player minimax value
    v_defect: np.ndarray          # per-player cycle-max defection value
    k_retaliations: np.ndarray    # Eq-style sufficient counts, pre bonus
    unbounded: np.ndarray         # True where v_egalitarian == v_retaliate
    coop: CoopSolution = field(repr=False, default=None)
    minimax: list = field(repr=False, default=None)


def exact_values(game: GameSpec, gamma: float = 1.0,
                 strict: bool = True) -> ExactValues:
    """All exact per-player values.  ``strict`` raises when a seat's
    cooperative value falls below its retaliation value (impossible for a
    symmetric game, so a modeling error for bundled games); custom loaded
    games report the anomaly as an unbounded-free K of 0 instead."""
    coop = exact_cooperative_values(game, gamma)
    n = game.num_players
    v_ret = np.zeros(n)
    v_def = np.zeros(n)
    minimax = []
    for j in range(n):
        mm = exact_minimax_values(game, j, gamma)
        minimax.append(mm)
        v_ret[j] = mm.value
        v_def[j] = exact_defect_value(game, j, gamma, coop).value
    egal = float(coop.player_returns.mean())
    k = np.zeros(n)
    unbounded = np.zeros(n, dtype=bool)
    for j in range(n):
        gap = egal - v_ret[j]
        if gap < -1e-9:
            if strict:
                raise ContractViolation(
                    f"v_cooperate < v_retaliate for player {j}: not a "
                    f"repeated symmetric game or a broken model")
            k[j] = 0
            continue
        if gap <= 1e-9:
            unbounded[j] = True
            k[j] = UNBOUNDED
        else:
            k[j] = max(0, math.ceil((v_def[j] - egal) / gap - 1e-12))
    return ExactValues(
        game=game.name,
        v_cooperate=coop.player_returns,
        v_egalitarian=egal,
        v_retaliate=v_ret,
        v_defect=v_def,
        k_retaliations=k,
        unbounded=unbounded,
        coop=coop,
        minimax=minimax,
    )


@dataclass
class FolkReport:
    holds: bool
    margins: np.ndarray
    unbounded: np.ndarray


def folk_inequality_check(game: GameSpec, values: ExactValues | None = None,
                          gamma: float = 1.0) -> FolkReport:
    """V^c >= (V^d + K V^r) / (K + 1) per player, skipping unbounded seats."""
    ev = values or exact_values(game, gamma)
    n = game.num_players
    margins = np.zeros(n)
    for j in range(n):
        if ev.unbounded[j]:
            margins[j] = 0.0
            continue
        k = ev.k_retaliations[j]
        rhs = (ev.v_defect[j] + k * ev.v_retaliate[j]) / (k + 1)
        margins[j] = ev.v_egalitarian - rhs
    holds = bool(np.all(margins >= -1e-9))
    return FolkReport(holds=holds, margins=margins, unbounded=ev.unbounded.copy())


def bellman_residual(game: GameSpec, gamma: float = 1.0) -> float:
    """Max deviation of the cooperative table from its one-step backup.

    The backup bootstraps from the value with one fewer remaining stage step
    (zero for single-step stages), matching the budgeted-stage recursion the
    table is defined by.
    """
    coop = exact_cooperative_values(game, gamma)
    S, JA = game.num_states, game.num_joint_actions
    rsum = game.rewards.sum(axis=2)
    P = game.transitions.reshape(S * JA, S)
    live = _live(game)
    V = np.zeros(S)
    for _ in range(game.max_stage_steps - 1):
        Q = rsum + gamma * (P @ (V * live)).reshape(S, JA)
        V = Q.max(axis=1)
    backup = rsum + gamma * (P @ (V * live)).reshape(S, JA)
    return float(np.abs(backup - coop.q).max())


def format_report(ev: ExactValues) -> str:
    lines = [f"game {ev.game}",
             f"players {len(ev.v_cooperate)}",
             f"egalitarian_value {_fmt(ev.v_egalitarian)}"]
    for j in range(len(ev.v_cooperate)):
        k = "UNBOUNDED" if ev.unbounded[j] else str(int(ev.k_retaliations[j]))
        lines.append(
            f"seat {j}: V^c={_fmt(ev.v_egalitarian)} "
            f"V^r={_fmt(ev.v_retaliate[j])} V^d={_fmt(ev.v_defect[j])} K={k}")
    return "\n".join(lines)


def _fmt(x: float) -> str:
    return f"{x:.6g}"

"""Bundled games: four iterated matrix games, four grid games and the
N-player cake-sharing dilemma.

Grid games are two-player gridworlds with simultaneous moves from
{up, down, left, right, stay}.  Walls block, two players can neither share a
cell nor swap cells, and a contested entry into a free cell is resolved
50/50.  Reaching a reward cell pays out and ends the stage immediately;
stages are otherwise cut off after 30 steps.

Stochastic outcomes that decide *who* gets paid (a contested entry into a
reward cell, the cake game's rob lottery) are folded into the transition law
via intermediate payout states, so that the reward function stays a
deterministic map of (state, joint action).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .games import (
    ContractViolation,
    GameSpec,
    Isomorphism,
    identity_isomorphism,
)

__all__ = [
    "GAME_NAMES",
    "CakeGameDef",
    "GridWorldDef",
    "MatrixGameDef",
    "build_cake_game",
    "build_game",
    "build_grid_game",
    "build_matrix_game",
    "cake_rewards",
]

# ---------------------------------------------------------------------------
# Matrix games

MOVE_LABELS = ("up", "down", "left", "right", "stay")


@dataclass
class MatrixGameDef:
    name: str
    action_labels: tuple[str, ...]
    payoffs: np.ndarray  # shape (A, A, 2)


_MATRIX_GAMES = {
    "ipd": MatrixGameDef(
        name="ipd",
        action_labels=("C", "D"),
        payoffs=np.array([[(-1, -1), (-3, 0)],
                          [(0, -3), (-2, -2)]], dtype=float),
    ),
    "aipd": MatrixGameDef(
        name="aipd",
        action_labels=("C", "D"),
        payoffs=np.array([[(-1, -1), (-3, 10)],
                          [(10, -3), (-2, -2)]], dtype=float),
    ),
    "ich": MatrixGameDef(
        name="ich",
        action_labels=("Swerve", "Straight"),
        payoffs=np.array([[(2, 2), (1, 3)],
                          [(3, 1), (0, 0)]], dtype=float),
    ),
    "rps": MatrixGameDef(
        name="rps",
        action_labels=("R", "P", "S"),
        payoffs=np.array([[(0, 0), (-1, 1), (1, -1)],
                          [(1, -1), (0, 0), (-1, 1)],
                          [(-1, 1), (1, -1), (0, 0)]], dtype=float),
    ),
}


def build_matrix_game(name: str) -> GameSpec:
    """A single-state game whose stages are one simultaneous move."""
    key = name.lower()
    if key not in _MATRIX_GAMES:
        raise KeyError(f"unknown matrix game {name!r}")
    spec = _MATRIX_GAMES[key]
    n_a = len(spec.action_labels)
    ja = n_a * n_a
    transitions = np.ones((1, ja, 1))
    rewards = spec.payoffs.reshape(1, ja, 2)
    game = GameSpec(
        name=key,
        num_players=2,
        num_states=1,
        action_counts=(n_a, n_a),
        transitions=transitions,
        rewards=rewards.copy(),
        initial_dist=np.array([1.0]),
        max_stage_steps=1,
        absorbing=np.zeros(1, dtype=bool),
        action_labels=(spec.action_labels, spec.action_labels),
        state_labels=("s0",),
    )
    for perm in [(0, 1), (1, 0)]:
        game.symmetries[perm] = identity_isomorphism(perm, 1, game.action_counts)
    return game


# ---------------------------------------------------------------------------
# Grid games


@dataclass
class RewardCell:
    kind: str                 # "owner" | "any" | "pair"
    owner: int = 0            # for "owner"
    value: float = 0.0        # for "owner" / "any"
    reacher: float = 0.0      # for "pair"
    other: float = 0.0        # for "pair"


@dataclass
class GridWorldDef:
    name: str
    width: int
    height: int
    walls: frozenset
    start_a: tuple[int, int]
    start_b: tuple[int, int]
    reward_cells: dict = field(default_factory=dict)
    collision_p: float = 0.5
    mirrored: bool = True     # left/right mirror exchanges the two seats

    def __post_init__(self) -> None:
        if self.start_a == self.start_b:
            raise ContractViolation("start positions must differ")
        for p in (self.start_a, self.start_b):
            if p in self.walls:
                raise ContractViolation("start position on a wall")
        for p in self.reward_cells:
            if p in self.walls:
                raise ContractViolation("reward cell on a wall")


def _grid_pd() -> GridWorldDef:
    walls = {(0, c) for c in range(9) if c != 4}
    cells = {
        (1, 0): RewardCell("owner", owner=0, value=100.0),
        (1, 8): RewardCell("owner", owner=1, value=100.0),
        (0, 4): RewardCell("any", value=100.0),
    }
    return GridWorldDef("grid_pd", width=9, height=2, walls=frozenset(walls),
                        start_a=(1, 3), start_b=(1, 5), reward_cells=cells)


def _compromise() -> GridWorldDef:
    walls = {(0, c) for c in (1, 3, 5, 7)}
    cells = {
        (0, 2): RewardCell("owner", owner=1, value=100.0),
        (0, 6): RewardCell("owner", owner=0, value=100.0),
    }
    return GridWorldDef("compromise", width=9, height=2, walls=frozenset(walls),
                        start_a=(1, 2), start_b=(1, 6), reward_cells=cells)


def _coordination() -> GridWorldDef:
    cells = {
        (0, 0): RewardCell("owner", owner=1, value=100.0),
        (0, 2): RewardCell("owner", owner=0, value=100.0),
    }
    return GridWorldDef("coordination", width=3, height=3, walls=frozenset(),
                        start_a=(2, 0), start_b=(2, 2), reward_cells=cells)


def _temptation() -> GridWorldDef:
    cells = {
        (0, 0): RewardCell("pair", reacher=20.0, other=-10.0),
        (0, 3): RewardCell("pair", reacher=20.0, other=-10.0),
        (1, 0): RewardCell("pair", reacher=40.0, other=-20.0),
        (1, 3): RewardCell("pair", reacher=40.0, other=-20.0),
    }
    return GridWorldDef("temptation", width=4, height=2, walls=frozenset(),
                        start_a=(0, 1), start_b=(0, 2), reward_cells=cells)


_GRID_GAMES = {
    "grid_pd": _grid_pd,
    "compromise": _compromise,
    "coordination": _coordination,
    "temptation": _temptation,
}

_MOVES = {0: (-1, 0), 1: (1, 0), 2: (0, -1), 3: (0, 1), 4: (0, 0)}
_MIRROR_MOVE = np.array([0, 1, 3, 2, 4])  # left <-> right


def _target(grid: GridWorldDef, pos, move):
    dr, dc = _MOVES[move]
    r, c = pos[0] + dr, pos[1] + dc
    if not (0 <= r < grid.height and 0 <= c < grid.width) or (r, c) in grid.walls:
        return pos
    return (r, c)


def _resolve_moves(grid: GridWorldDef, pa, pb, ma, mb):
    """Outcomes [(final_a, final_b, prob)] of a simultaneous move.

    With swaps excluded, a target conflict is either a walk into a kept cell
    (deterministic block) or a 50/50 contest for a free cell.  A move into a
    cell its occupant is vacating always succeeds (``ta == pb`` here forces
    ``tb != pb``, otherwise the targets would coincide).
    """
    ta, tb = _target(grid, pa, ma), _target(grid, pb, mb)
    if ta == tb:
        if ta == pa or ta == pb:    # walking into an occupied, kept cell
            return [(pa, pb, 1.0)]
        p = grid.collision_p
        return [(ta, pb, p), (pa, tb, 1.0 - p)]
    if ta == pb and tb == pa:       # swap attempt: neither vacates
        return [(pa, pb, 1.0)]
    return [(ta, tb, 1.0)]


def _cell_rewards(grid: GridWorldDef, prev, final):
    """(reward vector, scored) for final positions after a step."""
    rewards = np.zeros(2)
    scored = False
    for seat in range(2):
        pos = final[seat]
        cell = grid.reward_cells.get(pos)
        if cell is None or pos == prev[seat]:
            continue
        if cell.kind == "owner":
            if cell.owner == seat:
                rewards[seat] += cell.value
                scored = True
        elif cell.kind == "any":
            rewards[seat] += cell.value
            scored = True
        else:  # pair
            rewards[seat] += cell.reacher
            rewards[1 - seat] += cell.other
            scored = True
    return rewards, scored


def build_grid_game(name: str) -> GameSpec:
    key = name.lower()
    if key not in _GRID_GAMES:
        raise KeyError(f"unknown grid game {name!r}")
    grid = _GRID_GAMES[key]()

    cells = [(r, c) for r in range(grid.height) for c in range(grid.width)
             if (r, c) not in grid.walls]
    cell_index = {p: i for i, p in enumerate(cells)}
    pairs = [(a, b) for a in cells for b in cells if a != b]
    pair_index = {p: i for i, p in enumerate(pairs)}

    raw = {}  # (pair_idx, ja) -> list of (prob, reward vec, scored, final pair)
    for (pa, pb), sidx in pair_index.items():
        for ja, (ma, mb) in enumerate(itertools.product(range(5), range(5))):
            outs = []
            for fa, fb, prob in _resolve_moves(grid, pa, pb, ma, mb):
                rew, scored = _cell_rewards(grid, (pa, pb), (fa, fb))
                outs.append((prob, rew, scored, (fa, fb)))
            raw[(sidx, ja)] = outs

    # payout states are needed only when a contest decides who scores
    n_pairs = len(pairs)
    payout_index: dict[tuple[float, float], int] = {}
    for outs in raw.values():
        if len({tuple(o[1]) for o in outs}) > 1:
            for _prob, rew, scored, _fin in outs:
                if scored:
                    payout_index.setdefault((rew[0], rew[1]),
                                            len(payout_index))
    payout_vectors = list(payout_index)

    S = n_pairs + len(payout_vectors) + 1
    terminal = S - 1
    ja_count = 25
    P = np.zeros((S, ja_count, S))
    R = np.zeros((S, ja_count, 2))

    for (sidx, ja), outs in raw.items():
        uniform_reward = len({tuple(o[1]) for o in outs}) == 1
        for prob, rew, scored, fin in outs:
            if uniform_reward:
                R[sidx, ja] = rew
                nxt = terminal if scored else pair_index[fin]
            else:
                # reward decided by the contest: route through a payout state
                nxt = (n_pairs + payout_index[(rew[0], rew[1])]
                       if scored else pair_index[fin])
            P[sidx, ja, nxt] += prob

    for k, vec in enumerate(payout_vectors):
        s = n_pairs + k
        P[s, :, terminal] = 1.0
        R[s, :, 0] = vec[0]
        R[s, :, 1] = vec[1]
    P[terminal, :, terminal] = 1.0

    absorbing = np.zeros(S, dtype=bool)
    absorbing[terminal] = True

    init = np.zeros(S)
    init[pair_index[(grid.start_a, grid.start_b)]] = 1.0

    labels = tuple(f"A{a}B{b}" for a, b in pairs) + tuple(
        f"payout({v[0]:g},{v[1]:g})" for v in payout_vectors) + ("end",)

    game = GameSpec(
        name=key,
        num_players=2,
        num_states=S,
        action_counts=(5, 5),
        transitions=P,
        rewards=R,
        initial_dist=init,
        max_stage_steps=30,
        absorbing=absorbing,
        action_labels=(MOVE_LABELS, MOVE_LABELS),
        state_labels=labels,
    )
    game.symmetries[(0, 1)] = identity_isomorphism((0, 1), S, (5, 5))
    if grid.mirrored:
        mirror = lambda p: (p[0], grid.width - 1 - p[1])
        state_map = np.empty(S, dtype=int)
        for (pa, pb), i in pair_index.items():
            state_map[i] = pair_index[(mirror(pb), mirror(pa))]
        for k, vec in enumerate(payout_vectors):
            state_map[n_pairs + k] = n_pairs + payout_index[(vec[1], vec[0])]
        state_map[terminal] = terminal
        game.symmetries[(1, 0)] = Isomorphism(
            perm=(1, 0), state_map=state_map,
            action_maps=(_MIRROR_MOVE.copy(), _MIRROR_MOVE.copy()))
    return game


# ---------------------------------------------------------------------------
# Cake game

CAKE_ACTIONS = ("share", "rob", "poison")


@dataclass
class CakeGameDef:
    num_players: int = 3

    def __post_init__(self) -> None:
        if self.num_players < 2:
            raise ContractViolation("cake game needs at least 2 players")


def cake_rewards(actions) -> np.ndarray:
    """Deterministic-expectation payoff of one cake round.

    With robbers present the lottery winner's payoff is split out by the game
    transition; here the expected vector is returned (used directly only when
    no one robs, where the outcome is deterministic).
    """
    n = len(actions)
    if n < 2:
        raise ContractViolation("cake game needs at least 2 players")
    acts = []
    for a in actions:
        if isinstance(a, str):
            if a not in CAKE_ACTIONS:
                raise ContractViolation(f"unknown cake action {a!r}")
            acts.append(CAKE_ACTIONS.index(a))
        else:
            if not 0 <= a < 3:
                raise ContractViolation(f"unknown cake action {a!r}")
            acts.append(int(a))
    n_s = acts.count(0)
    n_r = acts.count(1)
    n_p = acts.count(2)
    cost = n_p / (n - 1)
    out = np.zeros(n)
    if n_r == 0:
        if n_s > 0:
            share = (1.0 - cost) / n_s
            for i, a in enumerate(acts):
                if a == 0:
                    out[i] = share
    else:
        win = (0.5 - cost) / n_r
        for i, a in enumerate(acts):
            if a == 1:
                out[i] = win
    return out


def build_cake_game(num_players: int = 3) -> GameSpec:
    """Share/rob/poison tensor game.

    Profiles without robbers resolve in one step.  A rob triggers a uniform
    lottery among the robbers, modeled as a transition into a winner state
    that pays the (poison-discounted) loot on the forced second step.
    """
    spec = CakeGameDef(num_players)
    n = spec.num_players
    ja = 3 ** n
    # states: s0, winner(k, n_p) for k seats x n_p in 0..n-1, terminal
    win_state = {}
    labels = ["s0"]
    for k in range(n):
        for n_p in range(n):
            win_state[(k, n_p)] = len(labels)
            labels.append(f"win{k}p{n_p}")
    terminal = len(labels)
    labels.append("end")
    S = terminal + 1

    P = np.zeros((S, ja, S))
    R = np.zeros((S, ja, n))
    profiles = list(itertools.product(range(3), repeat=n))
    for jidx, prof in enumerate(profiles):
        robbers = [i for i, a in enumerate(prof) if a == 1]
        n_p = sum(1 for a in prof if a == 2)
        if not robbers:
            R[0, jidx] = cake_rewards(prof)
            P[0, jidx, terminal] = 1.0
        else:
            for k in robbers:
                P[0, jidx, win_state[(k, n_p)]] += 1.0 / len(robbers)
    for (k, n_p), s in win_state.items():
        P[s, :, terminal] = 1.0
        R[s, :, k] = 0.5 - n_p / (n - 1)
    P[terminal, :, terminal] = 1.0

    absorbing = np.zeros(S, dtype=bool)
    absorbing[terminal] = True
    init = np.zeros(S)
    init[0] = 1.0

    game = GameSpec(
        name="cake" if n == 3 else f"cake{n}",
        num_players=n,
        num_states=S,
        action_counts=(3,) * n,
        transitions=P,
        rewards=R,
        initial_dist=init,
        max_stage_steps=2,
        absorbing=absorbing,
        action_labels=(CAKE_ACTIONS,) * n,
        state_labels=tuple(labels),
    )
    for perm in itertools.permutations(range(n)):
        state_map = np.arange(S)
        for (k, n_p), s in win_state.items():
            state_map[s] = win_state[(perm[k], n_p)]
        game.symmetries[perm] = Isomorphism(
            perm=perm, state_map=state_map,
            action_maps=tuple(np.arange(3) for _ in range(n)))
    return game


# ---------------------------------------------------------------------------
# Registry

GAME_NAMES = ("ipd", "aipd", "ich", "rps",
              "grid_pd", "compromise", "coordination", "temptation",
              "cake")


def build_game(name: str) -> GameSpec:
    key = name.lower()
    if key in _MATRIX_GAMES:
        return build_matrix_game(key)
    if key in _GRID_GAMES:
        return build_grid_game(key)
    if key == "cake":
        return build_cake_game(3)
    if key.startswith("cake"):
        return build_cake_game(int(key[4:]))
    raise KeyError(f"unknown game {name!r}")

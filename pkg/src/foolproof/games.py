"""Core abstractions for repeated symmetric stochastic games.

A game is a finite tuple (states, per-player action sets, transition law,
reward functions, initial distribution) played in *stages*: each stage runs
until an absorbing state is reached or the step budget is exhausted, then the
game resets.  Matrix games are single-state games with a 1-step budget.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "GameSpec",
    "Isomorphism",
    "StageRecord",
    "SymmetryReport",
    "Transition",
    "check_symmetry",
    "compose_isomorphism",
    "cyclic_permutation",
    "expected_returns",
    "identity_isomorphism",
    "is_n_cyclic",
    "run_stage",
    "step",
]


class ContractViolation(ValueError):
    """An argument broke a documented precondition."""


@dataclass(eq=False)
class Isomorphism:
    """A game self-map realizing a player permutation.

    ``state_map[s]`` is the relabeled state and ``action_maps[i][a]`` is the
    action of seat ``perm[i]`` that corresponds to action ``a`` of seat ``i``.
    Games whose seats are only exchangeable up to such a relabeling (the grid
    games, whose layouts are mirror images) register one per permutation.
    """

    perm: tuple[int, ...]
    state_map: np.ndarray
    action_maps: tuple[np.ndarray, ...]


def identity_isomorphism(perm: tuple[int, ...], num_states: int,
                         action_counts: tuple[int, ...]) -> Isomorphism:
    return Isomorphism(
        perm=perm,
        state_map=np.arange(num_states),
        action_maps=tuple(np.arange(n) for n in action_counts),
    )


def compose_isomorphism(a: Isomorphism, b: Isomorphism) -> Isomorphism:
    """Isomorphism applying ``b`` after ``a`` (permutation ``b.perm ∘ a.perm``)."""
    perm = tuple(b.perm[p] for p in a.perm)
    state_map = b.state_map[a.state_map]
    # seat i -> a.perm[i] with a's map, then -> b.perm[a.perm[i]] with b's.
    action_maps = tuple(b.action_maps[a.perm[i]][a.action_maps[i]]
                        for i in range(len(a.perm)))
    return Isomorphism(perm=perm, state_map=state_map, action_maps=action_maps)


@dataclass(eq=False)
class GameSpec:
    """Dense description of a repeated stochastic game.

    transitions has shape (S, JA, S), rewards (S, JA, N) with JA the number
    of joint actions flattened in C order (seat 0 most significant).
    """

    name: str
    num_players: int
    num_states: int
    action_counts: tuple[int, ...]
    transitions: np.ndarray
    rewards: np.ndarray
    initial_dist: np.ndarray
    max_stage_steps: int
    absorbing: np.ndarray
    action_labels: tuple[tuple[str, ...], ...] = ()
    state_labels: tuple[str, ...] = ()
    symmetries: dict[tuple[int, ...], Isomorphism] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.num_players < 2:
            raise ContractViolation("a game needs at least two players")
        if self.max_stage_steps < 1:
            raise ContractViolation("max_stage_steps must be >= 1")
        if any(n < 1 for n in self.action_counts):
            raise ContractViolation("every action set must be non-empty")
        ja = int(np.prod(self.action_counts))
        if self.transitions.shape != (self.num_states, ja, self.num_states):
            raise ContractViolation("transition table has wrong shape")
        if self.rewards.shape != (self.num_states, ja, self.num_players):
            raise ContractViolation("reward table has wrong shape")
        if not np.all(np.isfinite(self.rewards)):
            raise ContractViolation("rewards must be finite")
        rowsums = self.transitions.sum(axis=2)
        if np.max(np.abs(rowsums - 1.0)) > 1e-9:
            raise ContractViolation("transition rows must sum to 1")
        if abs(self.initial_dist.sum() - 1.0) > 1e-9 or np.any(self.initial_dist < 0):
            raise ContractViolation("initial distribution must sum to 1")
        if not self.action_labels:
            self.action_labels = tuple(
                tuple(str(a) for a in range(n)) for n in self.action_counts)

    @cached_property
    def num_joint_actions(self) -> int:
        return int(np.prod(self.action_counts))

    @cached_property
    def joint_strides(self) -> tuple[int, ...]:
        strides = [1] * self.num_players
        for i in range(self.num_players - 2, -1, -1):
            strides[i] = strides[i + 1] * self.action_counts[i + 1]
        return tuple(strides)

    @cached_property
    def joint_actions(self) -> tuple[tuple[int, ...], ...]:
        return tuple(itertools.product(*(range(n) for n in self.action_counts)))

    @cached_property
    def _cum_transitions(self) -> np.ndarray:
        return np.cumsum(self.transitions, axis=2)

    @cached_property
    def _deterministic_next(self) -> np.ndarray:
        """next-state index where the transition is a point mass, else -1."""
        argmax = self.transitions.argmax(axis=2)
        mass = np.take_along_axis(self.transitions, argmax[:, :, None], axis=2)[:, :, 0]
        return np.where(mass > 1.0 - 1e-12, argmax, -1)

    def joint_index(self, actions) -> int:
        idx = 0
        for i, a in enumerate(actions):
            if not 0 <= a < self.action_counts[i]:
                raise ContractViolation(
                    f"action {a} out of range for player {i}")
            idx += a * self.joint_strides[i]
        return idx

    def joint_action(self, index: int) -> tuple[int, ...]:
        return self.joint_actions[index]

    def check_state(self, s: int) -> None:
        if not 0 <= s < self.num_states:
            raise ContractViolation(f"state {s} out of range")

    def isomorphism(self, perm: tuple[int, ...]) -> Isomorphism:
        iso = self.symmetries.get(tuple(perm))
        if iso is None:
            iso = identity_isomorphism(tuple(perm), self.num_states,
                                       self.action_counts)
        return iso


@dataclass
class Transition:
    """One observed environment step, broadcast to every agent."""

    state: int
    actions: tuple[int, ...]
    rewards: np.ndarray
    next_state: int
    stage_end: bool
    step_index: int


@dataclass
class StageRecord:
    stage_index: int
    trajectory: list[Transition]
    stage_returns: np.ndarray


@dataclass
class SymmetryReport:
    passed: bool
    max_deviation: float
    permutation: tuple[int, ...]


def cyclic_permutation(n: int) -> tuple[int, ...]:
    """The rotation i -> i+1 mod n, which is n-cyclic."""
    if n < 1:
        raise ContractViolation("need at least one player")
    return tuple((i + 1) % n for i in range(n))


def is_n_cyclic(perm: tuple[int, ...]) -> bool:
    n = len(perm)
    seen = set()
    i = 0
    for _ in range(n):
        seen.add(i)
        i = perm[i]
    return len(seen) == n


def permutation_power(perm: tuple[int, ...], k: int) -> tuple[int, ...]:
    out = tuple(range(len(perm)))
    for _ in range(k % _order(perm)):
        out = tuple(perm[i] for i in out)
    return out


def _order(perm: tuple[int, ...]) -> int:
    n = len(perm)
    out = tuple(range(n))
    for k in range(1, n + 1):
        out = tuple(perm[i] for i in out)
        if out == tuple(range(n)):
            return k
    return n


def step(game: GameSpec, s: int, a, rng: np.random.Generator,
         steps_taken: int = 0):
    """Sample one environment step.

    Returns (next_state, reward_vector, terminal) where terminal is true if
    the next state is absorbing or this step exhausts the stage budget.
    """
    game.check_state(s)
    ja = game.joint_index(a)
    nxt = int(game._deterministic_next[s, ja])
    if nxt < 0:
        u = rng.random()
        nxt = int(np.searchsorted(game._cum_transitions[s, ja], u, side="right"))
        nxt = min(nxt, game.num_states - 1)
    rewards = game.rewards[s, ja].copy()
    terminal = bool(game.absorbing[nxt]) or steps_taken + 1 >= game.max_stage_steps
    return nxt, rewards, terminal


def sample_initial_state(game: GameSpec, rng: np.random.Generator) -> int:
    u = rng.random()
    cum = np.cumsum(game.initial_dist)
    return int(min(np.searchsorted(cum, u, side="right"), game.num_states - 1))


def run_stage(game: GameSpec, agents, t: int, rng: np.random.Generator,
              gamma: float = 1.0) -> StageRecord:
    """Play one full stage game, feeding every transition to every agent."""
    if len(agents) != game.num_players:
        raise ContractViolation("one agent per player required")
    s = sample_initial_state(game, rng)
    trajectory: list[Transition] = []
    returns = np.zeros(game.num_players)
    discount = 1.0
    for k in range(game.max_stage_steps):
        actions = tuple(agent.act(s) for agent in agents)
        nxt, rewards, terminal = step(game, s, actions, rng, steps_taken=k)
        trans = Transition(state=s, actions=actions, rewards=rewards,
                           next_state=nxt, stage_end=terminal, step_index=k)
        trajectory.append(trans)
        returns += discount * rewards
        discount *= gamma
        for agent in agents:
            agent.observe(trans)
        s = nxt
        if terminal:
            break
    return StageRecord(stage_index=t, trajectory=trajectory, stage_returns=returns)


def expected_returns(game: GameSpec, profile, horizon: int) -> np.ndarray:
    """Exact expected per-player stage return under a stationary profile.

    ``profile`` is a list of per-player policy arrays of shape (S, A_i).
    The stage runs for ``horizon`` steps or until absorption, undiscounted.
    """
    if horizon <= 0:
        raise ContractViolation("horizon must be positive")
    S, ja = game.num_states, game.num_joint_actions
    joint = np.ones((S, ja))
    for i, pol in enumerate(profile):
        for jidx, acts in enumerate(game.joint_actions):
            joint[:, jidx] *= pol[:, acts[i]]
    dist = game.initial_dist.copy()
    dist[game.absorbing] = 0.0
    totals = np.zeros(game.num_players)
    for _ in range(horizon):
        if dist.sum() <= 0:
            break
        # expected reward gathered this step
        sa = dist[:, None] * joint
        totals += np.einsum("sj,sjn->n", sa, game.rewards)
        dist = np.einsum("sj,sjt->t", sa, game.transitions)
        dist[game.absorbing] = 0.0
    return totals


def transformed_profile(game: GameSpec, profile, perm: tuple[int, ...]):
    """Profile where seat i plays seat perm[i]'s strategy through the
    registered state/action relabeling (identity relabeling by default)."""
    iso = game.isomorphism(perm)
    out = []
    for i in range(game.num_players):
        src = profile[perm[i]]
        # pi''_i(a | s) = pi_perm(i)(m_i(a) | state_map(s))
        pol = src[iso.state_map][:, iso.action_maps[i]]
        out.append(np.ascontiguousarray(pol))
    return out


def check_symmetry(game: GameSpec, psi: tuple[int, ...], profile,
                   horizon: int) -> SymmetryReport:
    """Verify the permutation-invariance of expected returns.

    Compares the return of seat psi(i) under ``profile`` with the return of
    seat i when every seat plays its image's strategy (relabeled through the
    game's registered isomorphism, if any).
    """
    if horizon <= 0:
        raise ContractViolation("horizon must be positive")
    base = expected_returns(game, profile, horizon)
    permuted = expected_returns(game, transformed_profile(game, profile, psi),
                                horizon)
    dev = float(max(abs(base[psi[i]] - permuted[i])
                    for i in range(game.num_players)))
    return SymmetryReport(passed=dev < 1e-6, max_deviation=dev,
                          permutation=tuple(psi))


def random_profile(game: GameSpec, rng: np.random.Generator):
    """A random stationary mixed profile, handy for symmetry checks."""
    profile = []
    for n in game.action_counts:
        logits = rng.random((game.num_states, n))
        profile.append(logits / logits.sum(axis=1, keepdims=True))
    return profile

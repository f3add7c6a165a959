"""Self-interested baseline agents: independent epsilon-greedy Q-learning,
tabular softmax policy gradient, and fixed scripted policies.

All agents expose the same two-call protocol as the cooperative learner:
``act(state) -> action`` and ``observe(transition)``.
"""

from __future__ import annotations

import numpy as np

from .games import ContractViolation, GameSpec, Transition
from .learning import QTable, VisitCounter

__all__ = [
    "AdamState",
    "FixedPolicyAgent",
    "PGAgent",
    "ScriptedAgent",
    "SelfishQAgent",
]


class SelfishQAgent:
    """Independent Q-learning over the agent's own actions with decaying
    epsilon-greedy behavior; every other player is folded into the
    environment dynamics."""

    def __init__(self, game: GameSpec, seat: int, epsilon: float, decay: float,
                 seed: int, gamma: float = 1.0):
        self.game = game
        self.seat = seat
        self.q = QTable.for_game(game, ("selfish", seat))
        self.visits = VisitCounter(game.num_states, game.action_counts[seat])
        self.epsilon = epsilon
        self.decay = decay
        self.gamma = gamma
        self._threshold = epsilon
        self._rng = np.random.Generator(np.random.PCG64(seed))

    def act(self, s: int) -> int:
        n = self.game.action_counts[self.seat]
        explore = self._rng.random() < self._threshold
        self._threshold *= self.decay
        if explore:
            return int(self._rng.integers(n))
        return int(np.argmax(self.q.values[s]))

    def observe(self, trans: Transition) -> None:
        a = trans.actions[self.seat]
        self.visits.record(trans.state, a)
        alpha = 1.0 / self.visits.count(trans.state, a)
        boot = 0.0 if trans.stage_end else float(
            self.q.values[trans.next_state].max())
        target = float(trans.rewards[self.seat]) + self.gamma * boot
        self.q.values[trans.state, a] += alpha * (
            target - self.q.values[trans.state, a])


class AdamState:
    """First/second-moment accumulators for a single parameter array."""

    def __init__(self, shape, lr: float = 0.1, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(shape)
        self.v = np.zeros(shape)
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> None:
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad * grad
        mhat = self.m / (1 - self.beta1 ** self.t)
        vhat = self.v / (1 - self.beta2 ** self.t)
        params += self.lr * mhat / (np.sqrt(vhat) + self.eps)


class PGAgent:
    """Tabular softmax policy trained with Monte-Carlo policy gradient.

    Gradients use the undiscounted return-to-go from each visited step of a
    stage and are applied once per stage with Adam (ascent).
    """

    def __init__(self, game: GameSpec, seat: int, seed: int, lr: float = 0.1,
                 gamma: float = 1.0):
        self.game = game
        self.seat = seat
        self.gamma = gamma
        n = game.action_counts[seat]
        self.logits = np.zeros((game.num_states, n))
        self.opt = AdamState(self.logits.shape, lr=lr)
        self._rng = np.random.Generator(np.random.PCG64(seed))
        self._episode: list[tuple[int, int, float]] = []

    def policy(self, s: int) -> np.ndarray:
        z = self.logits[s] - self.logits[s].max()
        p = np.exp(z)
        return p / p.sum()

    def act(self, s: int) -> int:
        p = self.policy(s)
        u = self._rng.random()
        return int(min(np.searchsorted(np.cumsum(p), u, side="right"),
                       len(p) - 1))

    def observe(self, trans: Transition) -> None:
        self._episode.append((trans.state, trans.actions[self.seat],
                              float(trans.rewards[self.seat])))
        if trans.stage_end:
            self._update()
            self._episode = []

    def episode_gradient(self, episode) -> np.ndarray:
        """Score-function gradient of the expected stage return."""
        grad = np.zeros_like(self.logits)
        g = 0.0
        togo = []
        for _s, _a, r in reversed(episode):
            g = r + self.gamma * g
            togo.append(g)
        togo.reverse()
        for (s, a, _r), ret in zip(episode, togo):
            p = self.policy(s)
            grad[s] -= ret * p
            grad[s, a] += ret
        return grad

    def _update(self) -> None:
        if not self._episode:
            return
        self.opt.step(self.logits, self.episode_gradient(self._episode))


class ScriptedAgent:
    """Plays one fixed action everywhere.  ``always_cooperate`` style play is
    action 0 in every bundled matrix game; ``rob`` is action 1 in the cake
    game."""

    def __init__(self, action: int):
        self.action = action

    def act(self, s: int) -> int:
        return self.action

    def observe(self, trans: Transition) -> None:
        pass


class FixedPolicyAgent:
    """Samples from a given stationary policy array of shape (S, A)."""

    def __init__(self, policy: np.ndarray, seed: int):
        policy = np.asarray(policy, dtype=float)
        if policy.ndim != 2 or np.any(policy < 0):
            raise ContractViolation("policy must be a nonnegative (S, A) array")
        rows = policy.sum(axis=1, keepdims=True)
        if np.max(np.abs(rows - 1.0)) > 1e-9:
            raise ContractViolation("policy rows must sum to 1")
        self.policy = policy
        self._rng = np.random.Generator(np.random.PCG64(seed))

    def act(self, s: int) -> int:
        p = self.policy[s]
        u = self._rng.random()
        return int(min(np.searchsorted(np.cumsum(p), u, side="right"),
                       len(p) - 1))

    def observe(self, trans: Transition) -> None:
        pass

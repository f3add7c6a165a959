"""Plain-text game description files.

One record per line, whitespace separated:

    game <name>
    players <N>
    states <S>
    max_stage_steps <H>
    actions <seat> <label> [<label> ...]
    state_label <s> <label>            (optional)
    absorbing <s> [<s> ...]            (optional)
    init <s> <prob>
    reward <s> <joint_action> <r_0> ... <r_{N-1}>
    transition <s> <joint_action> <next_s> <prob>

Joint actions are flattened in C order with seat 0 most significant.
Unlisted rewards are 0; every (state, joint action) must have transition
probabilities summing to 1.  Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import io

import numpy as np

from .games import ContractViolation, GameSpec

__all__ = ["export_game", "load_game", "loads_game"]


def export_game(game: GameSpec) -> str:
    out = io.StringIO()
    w = out.write
    w(f"game {game.name}\n")
    w(f"players {game.num_players}\n")
    w(f"states {game.num_states}\n")
    w(f"max_stage_steps {game.max_stage_steps}\n")
    for i, labels in enumerate(game.action_labels):
        w(f"actions {i} {' '.join(labels)}\n")
    for s, label in enumerate(game.state_labels):
        w(f"state_label {s} {label}\n")
    absorbing = np.flatnonzero(game.absorbing)
    if absorbing.size:
        w("absorbing " + " ".join(str(s) for s in absorbing) + "\n")
    for s in np.flatnonzero(game.initial_dist > 0):
        w(f"init {s} {game.initial_dist[s]:.17g}\n")
    for s in range(game.num_states):
        for ja in range(game.num_joint_actions):
            if np.any(game.rewards[s, ja] != 0):
                vals = " ".join(f"{r:.17g}" for r in game.rewards[s, ja])
                w(f"reward {s} {ja} {vals}\n")
            for nxt in np.flatnonzero(game.transitions[s, ja] > 0):
                w(f"transition {s} {ja} {nxt} "
                  f"{game.transitions[s, ja, nxt]:.17g}\n")
    return out.getvalue()


def loads_game(text: str) -> GameSpec:
    """Parse a game description; raises ContractViolation with the offending
    line number on malformed input."""
    header: dict[str, object] = {}
    actions: dict[int, tuple[str, ...]] = {}
    state_labels: dict[int, str] = {}
    absorbing: list[int] = []
    inits: list[tuple[int, float]] = []
    rewards: list[tuple[int, int, list[float]]] = []
    transitions: list[tuple[int, int, int, float]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        key, args = parts[0], parts[1:]
        try:
            if key == "game":
                header["name"] = " ".join(args)
            elif key in ("players", "states", "max_stage_steps"):
                header[key] = int(args[0])
            elif key == "actions":
                actions[int(args[0])] = tuple(args[1:])
            elif key == "state_label":
                state_labels[int(args[0])] = " ".join(args[1:])
            elif key == "absorbing":
                absorbing.extend(int(a) for a in args)
            elif key == "init":
                inits.append((int(args[0]), float(args[1])))
            elif key == "reward":
                rewards.append((int(args[0]), int(args[1]),
                                [float(x) for x in args[2:]]))
            elif key == "transition":
                transitions.append((int(args[0]), int(args[1]),
                                    int(args[2]), float(args[3])))
            else:
                raise ContractViolation(f"line {lineno}: unknown record {key!r}")
        except (ValueError, IndexError) as exc:
            raise ContractViolation(
                f"line {lineno}: malformed {key!r} record: {exc}") from exc

    for field in ("name", "players", "states", "max_stage_steps"):
        if field not in header:
            raise ContractViolation(f"missing required record {field!r}")
    n = int(header["players"])
    S = int(header["states"])
    for i in range(n):
        if i not in actions:
            raise ContractViolation(f"missing actions record for seat {i}")
    action_counts = tuple(len(actions[i]) for i in range(n))
    ja_count = int(np.prod(action_counts))

    P = np.zeros((S, ja_count, S))
    R = np.zeros((S, ja_count, n))
    init = np.zeros(S)
    absorbing_mask = np.zeros(S, dtype=bool)
    try:
        for s, p in inits:
            init[s] = p
        for s in absorbing:
            absorbing_mask[s] = True
        for s, ja, vec in rewards:
            if len(vec) != n:
                raise ContractViolation(
                    f"reward for state {s} has {len(vec)} entries, need {n}")
            R[s, ja] = vec
        for s, ja, nxt, p in transitions:
            P[s, ja, nxt] += p
    except IndexError as exc:
        raise ContractViolation(f"index out of range: {exc}") from exc

    labels = tuple(state_labels.get(s, f"s{s}") for s in range(S))
    return GameSpec(
        name=str(header["name"]),
        num_players=n,
        num_states=S,
        action_counts=action_counts,
        transitions=P,
        rewards=R,
        initial_dist=init,
        max_stage_steps=int(header["max_stage_steps"]),
        absorbing=absorbing_mask,
        action_labels=tuple(actions[i] for i in range(n)),
        state_labels=labels,
    )


def load_game(path: str) -> GameSpec:
    with open(path, encoding="utf-8") as fh:
        return loads_game(fh.read())

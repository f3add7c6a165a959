"""Cooperative learning in repeated symmetric stochastic games.

Library layout:

- ``games``: game containers, stage execution, symmetry checks
- ``envs``: the bundled matrix, grid-world and cake games
- ``solvers``: per-state matrix game solving (simplex, pure saddle ops)
- ``learning``: tables, learning rates, exploration, Q-update rules
- ``oracle``: exact dynamic-programming values and report checks
- ``fcl``: the foolproof cooperative agent
- ``baselines``: selfish Q-learning, policy gradient, scripted agents
- ``harness``: configured experiments, CSV persistence, summaries
"""

from .envs import GAME_NAMES, build_game
from .fcl import UNBOUNDED, FCLAgent, retaliation_count
from .games import (
    ContractViolation,
    GameSpec,
    Transition,
    check_symmetry,
    expected_returns,
    run_stage,
)
from .oracle import exact_values, folk_inequality_check

__all__ = [
    "GAME_NAMES",
    "ContractViolation",
    "FCLAgent",
    "GameSpec",
    "Transition",
    "UNBOUNDED",
    "build_game",
    "check_symmetry",
    "exact_values",
    "expected_returns",
    "folk_inequality_check",
    "retaliation_count",
    "run_stage",
]

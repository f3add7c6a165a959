"""Configured, seeded experiment runs with CSV persistence.

Config files use INI sections::

    [experiment]
    game = ipd
    runs = 20
    stages = 2000
    seed = 7
    window = 200          ; optional moving-average window for summaries
    output = ipd.csv      ; optional CSV path
    gamma = 1.0           ; optional

    [seat0]
    algo = fcl            ; fcl | q | pg | scripted | fixed-uniform
    epsilon = 0.5
    decay = 0.9
    bonus = 1             ; fcl retaliation bonus

    [seat1]
    algo = q
    epsilon = 0.5
    decay = 0.9

Unknown sections or keys are rejected.  All FCL seats in one run share one
exploration seed; every other agent draws from its own stream.  The same
config and seed always produce byte-identical CSV output.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import time
from dataclasses import dataclass, field

import numpy as np

from .baselines import FixedPolicyAgent, PGAgent, ScriptedAgent, SelfishQAgent
from .envs import build_game
from .fcl import FCLAgent
from .games import ContractViolation, GameSpec, run_stage
from .learning import LearningParams

__all__ = [
    "AgentSpec",
    "ExperimentConfig",
    "ResultRow",
    "RunRecord",
    "late_window_mean",
    "parse_config",
    "parse_config_file",
    "run_experiment",
    "summarize",
    "write_csv",
]

CSV_HEADER = "run,stage,seat,algo,stage_return,cum_avg"

_ALGOS = ("fcl", "q", "pg", "scripted", "fixed-uniform")

_SEAT_KEYS = {
    "algo": str,
    "epsilon": float,
    "decay": float,
    "bonus": int,
    "action": int,
    "lr": float,
}

_EXPERIMENT_KEYS = {
    "game": str,
    "runs": int,
    "stages": int,
    "seed": int,
    "window": int,
    "output": str,
    "gamma": float,
}


@dataclass
class AgentSpec:
    algo: str
    epsilon: float = 0.5
    decay: float = 0.9
    bonus: int = 1
    action: int = 0       # scripted agents
    lr: float = 0.1       # policy gradient


@dataclass
class ExperimentConfig:
    game: str
    seats: list[AgentSpec]
    num_runs: int = 20
    num_stages: int = 2000
    base_seed: int = 0
    gamma: float = 1.0
    window: int = 1
    output: str | None = None

    def __post_init__(self) -> None:
        if self.num_runs < 1:
            raise ContractViolation("runs must be >= 1")
        if self.num_stages < 1:
            raise ContractViolation("stages must be >= 1")
        if self.window < 1:
            raise ContractViolation("window must be >= 1")
        for spec in self.seats:
            if spec.algo not in _ALGOS:
                raise ContractViolation(
                    f"unknown algorithm {spec.algo!r}; choose from {_ALGOS}")

    def canonical_text(self) -> str:
        out = io.StringIO()
        out.write(f"game={self.game};runs={self.num_runs};"
                  f"stages={self.num_stages};seed={self.base_seed};"
                  f"gamma={self.gamma!r};window={self.window}\n")
        for i, s in enumerate(self.seats):
            out.write(f"seat{i}:algo={s.algo};eps={s.epsilon!r};"
                      f"decay={s.decay!r};bonus={s.bonus};"
                      f"action={s.action};lr={s.lr!r}\n")
        return out.getvalue()

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:16]


@dataclass
class ResultRow:
    run: int
    stage: int
    seat: int
    algo: str
    stage_return: float
    cum_avg: float


@dataclass
class RunRecord:
    config_hash: str
    seed: int
    wall_clock: float
    final_averages: np.ndarray
    defections: int = 0


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ContractViolation(f"config parse error: {exc}") from exc
    if "experiment" not in parser:
        raise ContractViolation("missing [experiment] section")

    exp = parser["experiment"]
    for key in exp:
        if key not in _EXPERIMENT_KEYS:
            raise ContractViolation(f"unknown key {key!r} in [experiment]")
    if "game" not in exp:
        raise ContractViolation("missing required key 'game' in [experiment]")

    seat_sections = [s for s in parser.sections() if s != "experiment"]
    seats: list[AgentSpec] = []
    for idx, name in enumerate(seat_sections):
        if name != f"seat{idx}":
            raise ContractViolation(
                f"unexpected section [{name}]; seats must be [seat0], "
                f"[seat1], ... in order")
        sec = parser[name]
        kwargs = {}
        for key, raw in sec.items():
            if key not in _SEAT_KEYS:
                raise ContractViolation(f"unknown key {key!r} in [{name}]")
            try:
                kwargs[key] = _SEAT_KEYS[key](raw)
            except ValueError as exc:
                raise ContractViolation(
                    f"bad value for {key!r} in [{name}]: {raw!r}") from exc
        if "algo" not in kwargs:
            raise ContractViolation(f"missing 'algo' in [{name}]")
        seats.append(AgentSpec(**kwargs))
    if not seats:
        raise ContractViolation("at least one [seatN] section is required")

    def get(key, default):
        if key not in exp:
            return default
        try:
            return _EXPERIMENT_KEYS[key](exp[key])
        except ValueError as exc:
            raise ContractViolation(
                f"bad value for {key!r} in [experiment]: {exp[key]!r}") from exc

    config = ExperimentConfig(
        game=exp["game"],
        seats=seats,
        num_runs=get("runs", 20),
        num_stages=get("stages", 2000),
        base_seed=get("seed", 0),
        gamma=get("gamma", 1.0),
        window=get("window", 1),
        output=exp.get("output") or None,
    )
    game = build_game(config.game)
    if len(seats) != game.num_players:
        raise ContractViolation(
            f"{config.game} has {game.num_players} seats, config defines "
            f"{len(seats)}")
    return config


def parse_config_file(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _seed(base: int, run: int, component: int) -> int:
    # stable arithmetic mixing; avoids collisions across (run, component)
    return (base * 1_000_003 + run * 1_009 + component * 13 + 7) % (2 ** 63)


def build_agents(game: GameSpec, config: ExperimentConfig, run: int):
    team_seed = _seed(config.base_seed, run, 0)
    agents = []
    for seat, spec in enumerate(config.seats):
        if spec.algo == "fcl":
            params = LearningParams(gamma=config.gamma,
                                    retaliation_bonus=spec.bonus)
            agents.append(FCLAgent(game, seat, spec.epsilon, spec.decay,
                                   team_seed, params))
        elif spec.algo == "q":
            agents.append(SelfishQAgent(game, seat, spec.epsilon, spec.decay,
                                        _seed(config.base_seed, run, seat + 1),
                                        gamma=config.gamma))
        elif spec.algo == "pg":
            agents.append(PGAgent(game, seat,
                                  _seed(config.base_seed, run, seat + 1),
                                  lr=spec.lr, gamma=config.gamma))
        elif spec.algo == "scripted":
            agents.append(ScriptedAgent(spec.action))
        elif spec.algo == "fixed-uniform":
            policy = np.full((game.num_states, game.action_counts[seat]),
                             1.0 / game.action_counts[seat])
            agents.append(FixedPolicyAgent(
                policy, _seed(config.base_seed, run, seat + 1)))
        else:  # pragma: no cover - guarded by ExperimentConfig
            raise ContractViolation(f"unknown algorithm {spec.algo!r}")
    return agents


def run_experiment(config: ExperimentConfig, run_indices=None):
    """Execute all runs; returns (rows, run records) and writes the CSV when
    an output path is configured.

    ``run_indices`` restricts execution to a subset of the configured runs
    (same seeds as the corresponding runs of the full experiment), which
    lets long experiments be sharded and re-assembled.
    """
    game = build_game(config.game)
    rows: list[ResultRow] = []
    records: list[RunRecord] = []
    chash = config.config_hash()
    if run_indices is None:
        run_indices = range(config.num_runs)
    for r in run_indices:
        if not 0 <= r < config.num_runs:
            raise ContractViolation(f"run index {r} outside configured range")
        t0 = time.perf_counter()
        env_rng = np.random.Generator(
            np.random.PCG64(_seed(config.base_seed, r, 99)))
        agents = build_agents(game, config, r)
        totals = np.zeros(game.num_players)
        for t in range(config.num_stages):
            rec = run_stage(game, agents, t, env_rng, gamma=config.gamma)
            totals += rec.stage_returns
            for seat in range(game.num_players):
                rows.append(ResultRow(
                    run=r, stage=t, seat=seat,
                    algo=config.seats[seat].algo,
                    stage_return=float(rec.stage_returns[seat]),
                    cum_avg=float(totals[seat] / (t + 1))))
        defections = sum(len(a.defection_log) for a in agents
                         if isinstance(a, FCLAgent))
        records.append(RunRecord(
            config_hash=chash,
            seed=_seed(config.base_seed, r, 99),
            wall_clock=time.perf_counter() - t0,
            final_averages=totals / config.num_stages,
            defections=defections))
    if config.output:
        write_csv(config.output, rows)
    return rows, records


def write_csv(path: str, rows: list[ResultRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(f"{row.run},{row.stage},{row.seat},{row.algo},"
                     f"{row.stage_return:.10g},{row.cum_avg:.10g}\n")


def read_csv(path: str) -> list[ResultRow]:
    rows: list[ResultRow] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ContractViolation(f"unexpected CSV header {header!r}")
        for line in fh:
            run, stage, seat, algo, ret, avg = line.rstrip("\n").split(",")
            rows.append(ResultRow(int(run), int(stage), int(seat), algo,
                                  float(ret), float(avg)))
    return rows


def summarize(rows: list[ResultRow], window: int = 1):
    """Per-seat learning curves: cross-run mean and standard error per stage,
    optionally smoothed with a trailing moving average."""
    if not rows:
        raise ContractViolation("no rows to summarize")
    if window < 1:
        raise ContractViolation("window must be >= 1")
    runs = sorted({r.run for r in rows})
    stages = max(r.stage for r in rows) + 1
    seats = sorted({r.seat for r in rows})
    run_pos = {r: i for i, r in enumerate(runs)}
    data = np.full((len(seats), len(runs), stages), np.nan)
    for row in rows:
        data[row.seat, run_pos[row.run], row.stage] = row.stage_return
    if np.any(np.isnan(data)):
        raise ContractViolation("missing (run, stage, seat) combinations")
    out = {}
    for seat in seats:
        mean = data[seat].mean(axis=0)
        if len(runs) > 1:
            stderr = data[seat].std(axis=0, ddof=1) / np.sqrt(len(runs))
        else:
            stderr = np.zeros(stages)
        if window > 1:
            kernel = np.ones(window)
            denom = np.convolve(np.ones(stages), kernel)[:stages]
            mean = np.convolve(mean, kernel)[:stages] / denom
            stderr = np.convolve(stderr, kernel)[:stages] / denom
        out[seat] = {"mean": mean, "stderr": stderr}
    return out


def late_window_mean(rows: list[ResultRow], seat: int,
                     fraction: float = 0.1) -> float:
    """Mean stage return of ``seat`` over the final ``fraction`` of stages,
    across all runs."""
    if not 0 < fraction <= 1:
        raise ContractViolation("fraction must lie in (0, 1]")
    stages = max(r.stage for r in rows) + 1
    cutoff = int(np.ceil(stages * (1 - fraction)))
    vals = [r.stage_return for r in rows
            if r.seat == seat and r.stage >= cutoff]
    if not vals:
        raise ContractViolation(f"no rows for seat {seat}")
    return float(np.mean(vals))

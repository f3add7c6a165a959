"""Command-line entry point.

Subcommands::

    foolproof run --config experiment.ini [--output out.csv]
    foolproof oracle --game ipd [--file custom.game]
    foolproof verify --game rps
    foolproof list-games
    foolproof export-game --game cake [--output cake.game]
"""

from __future__ import annotations

import argparse
import itertools
import sys

from .envs import GAME_NAMES, build_game
from .games import ContractViolation, check_symmetry, random_profile
from .gamefile import export_game, load_game
from .harness import late_window_mean, parse_config_file, run_experiment
from .oracle import (
    egalitarian_check,
    exact_values,
    folk_inequality_check,
    format_report,
)

import numpy as np


def _build(args):
    if getattr(args, "file", None):
        return load_game(args.file)
    return build_game(args.game)


def _cmd_run(args) -> int:
    config = parse_config_file(args.config)
    if args.output:
        config.output = args.output
    rows, records = run_experiment(config)
    game = build_game(config.game)
    ev = exact_values(game, config.gamma)
    print(f"game {config.game}: {config.num_runs} runs x "
          f"{config.num_stages} stages")
    for seat in range(game.num_players):
        late = late_window_mean(rows, seat)
        print(f"seat {seat} ({config.seats[seat].algo}): "
              f"late-window mean {late:.4f} "
              f"(minimax reference {ev.v_retaliate[seat]:.4f})")
    total = sum(rec.wall_clock for rec in records)
    print(f"wall clock {total:.1f}s, config hash {config.config_hash()}")
    if config.output:
        print(f"wrote {config.output}")
    return 0


def _cmd_oracle(args) -> int:
    game = _build(args)
    strict = not getattr(args, "file", None)
    ev = exact_values(game, strict=strict)
    print(format_report(ev))
    return 0


def _cmd_verify(args) -> int:
    game = _build(args)
    rng = np.random.default_rng(0)
    ok = True
    for perm in itertools.permutations(range(game.num_players)):
        if perm == tuple(range(game.num_players)):
            continue
        worst = 0.0
        for _ in range(3):
            rep = check_symmetry(game, perm, random_profile(game, rng),
                                 game.max_stage_steps)
            worst = max(worst, rep.max_deviation)
        status = "ok" if worst < 1e-6 else "FAIL"
        ok &= worst < 1e-6
        print(f"symmetry {perm}: {status} (max deviation {worst:.2e})")
    ev = exact_values(game, strict=False)
    folk = folk_inequality_check(game, ev)
    print(f"folk inequality: {'ok' if folk.holds else 'FAIL'} "
          f"(min margin {folk.margins.min():.3g})")
    ok &= folk.holds
    for j in range(game.num_players):
        if ev.unbounded[j]:
            print(f"seat {j}: retaliation UNBOUNDED "
                  f"(V^c = V^r = {ev.v_retaliate[j]:.6g})")
    egal = egalitarian_check(game)
    print(f"egalitarian averages equal: {'ok' if egal.equal else 'FAIL'}")
    print(f"no pure stationary profile beats the cycle: "
          f"{'ok' if egal.no_pure_profile_beats else 'FAIL'} "
          f"({egal.checked_profiles} profiles checked)")
    ok &= egal.equal and egal.no_pure_profile_beats
    return 0 if ok else 1


def _cmd_list_games(_args) -> int:
    for name in GAME_NAMES:
        print(name)
    return 0


def _cmd_export_game(args) -> int:
    game = _build(args)
    text = export_game(game)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="foolproof",
        description="Repeated symmetric stochastic games: cooperative "
                    "learning experiments and exact value reports.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a configured experiment")
    p.add_argument("--config", required=True, help="INI experiment config")
    p.add_argument("--output", help="override the CSV output path")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("oracle", help="print exact values for a game")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--game", choices=GAME_NAMES)
    g.add_argument("--file", help="game description file")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("verify",
                       help="symmetry, folk-inequality and egalitarian checks")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--game", choices=GAME_NAMES)
    g.add_argument("--file", help="game description file")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("list-games", help="list bundled game names")
    p.set_defaults(func=_cmd_list_games)

    p = sub.add_parser("export-game", help="write a game description file")
    p.add_argument("--game", required=True, choices=GAME_NAMES)
    p.add_argument("--output", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_export_game)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ContractViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

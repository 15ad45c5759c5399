"""Command-line front end: ``solve``, ``eval``, ``selfcheck``, ``list-games``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from armac.exact import PolicyTable, load_tree, nash_conv_report
from armac.exact.tree import TreeTooLarge
from armac.games import GAME_IDS, get_descriptor

from .config import ALGORITHMS, ConfigError, load_config
from .runner import solve
from .selfcheck import SUITES, run_selfcheck

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="armac", description="Regret-based self-play solvers for small imperfect-information games.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run an algorithm and write metrics CSV")
    p.add_argument("--game", choices=GAME_IDS)
    p.add_argument("--algo", choices=ALGORITHMS)
    p.add_argument("--iters", "--epochs", dest="iterations", type=int, metavar="N", help="iterations (CFR family) or epochs (ARMAC)")
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="JSON run configuration; flags override its values")
    p.add_argument("--out", help="output directory (metrics.csv, timing.csv, policy.json, run.json); CSV goes to stdout if omitted")
    p.add_argument("--eval-interval", dest="eval_interval", type=int, help="NashConv every N iterations (0: final only)")

    p = sub.add_parser("eval", help="NashConv of a saved policy file")
    p.add_argument("policy", help="policy JSON written by solve")
    p.add_argument("--game", choices=GAME_IDS, help="expected game (defaults to the file's)")

    p = sub.add_parser("selfcheck", help="run the verification suites")
    p.add_argument("--quick", action="store_true", help="smaller sample sizes")
    p.add_argument("--suite", action="append", choices=list(SUITES), help="run only this suite (repeatable)")

    sub.add_parser("list-games", help="show the available games")
    return parser


def cmd_solve(args) -> int:
    overrides = {k: getattr(args, k) for k in ("game", "algo", "iterations", "seed", "eval_interval", "out")}
    try:
        cfg = load_config(args.config, overrides)
    except (ConfigError, TypeError) as exc:
        print(f"armac solve: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.out:
        os.makedirs(cfg.out, exist_ok=True)
        with open(os.path.join(cfg.out, "metrics.csv"), "w", encoding="utf-8", newline="") as m, open(
            os.path.join(cfg.out, "timing.csv"), "w", encoding="utf-8", newline=""
        ) as t:
            result = solve(cfg, m, t)
    else:
        result = solve(cfg, sys.stdout)
    if cfg.out:
        final = result.final_nash_conv
        print(f"{cfg.algo} on {cfg.game}: {len(result.rows)} rows written to {cfg.out}" + (f"; final NashConv {final:.6g}" if final is not None else ""))
    return EXIT_OK


def cmd_eval(args) -> int:
    try:
        with open(args.policy, encoding="utf-8") as fh:
            game, table = PolicyTable.from_json(fh.read())
        get_descriptor(game)
    except OSError as exc:
        print(f"armac eval: cannot read {args.policy}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        print(f"armac eval: {args.policy}: not a valid policy file ({exc})", file=sys.stderr)
        return EXIT_USAGE
    if args.game and args.game != game:
        print(f"armac eval: policy is for {game}, not {args.game}", file=sys.stderr)
        return EXIT_USAGE
    try:
        tree = load_tree(game)
    except TreeTooLarge as exc:
        print(f"armac eval: {exc}", file=sys.stderr)
        return EXIT_USAGE
    unknown = [k for k in table if k not in tree.infoset_index]
    wrong = [k for k in table if k in tree.infoset_index and len(table[k]) != tree.num_actions]
    if unknown or wrong or table.num_actions != tree.num_actions:
        print(f"armac eval: policy does not match {game} ({len(unknown)} unknown states)", file=sys.stderr)
        return EXIT_USAGE
    rep = nash_conv_report(tree, table)
    print(f"game: {game}")
    print(f"nash_conv: {float(rep.nash_conv)!r}")
    for p in range(tree.num_players):
        print(f"player {p}: value {float(rep.values[p])!r}  best_response {float(rep.br_values[p])!r}  incentive {float(rep.deviation_incentives[p])!r}")
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    results = run_selfcheck(args.suite, quick=args.quick)
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed")
    return EXIT_FAILED if failed else EXIT_OK


def cmd_list_games(args) -> int:
    print(_table())
    return EXIT_OK


def _describe(game_id: str) -> dict:
    d = get_descriptor(game_id)
    return {"players": d.num_players, "max_actions": d.max_actions, "max_length": d.max_episode_length, "exact_oracle": d.enumerable}


def _table() -> str:
    lines = [f"{'game':<12}{'players':>8}{'actions':>9}{'length':>8}  exact oracle"]
    for g in GAME_IDS:
        d = _describe(g)
        lines.append(f"{g:<12}{d['players']:>8}{d['max_actions']:>9}{d['max_length']:>8}  {'yes' if d['exact_oracle'] else 'no'}")
    return "\n".join(lines)


COMMANDS = {"solve": cmd_solve, "eval": cmd_eval, "selfcheck": cmd_selfcheck, "list-games": cmd_list_games}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())

"""Produce the recorded long runs that tests/test_acceptance.py summarises.

    python scripts/long_runs.py sampled [--games leduc ...] [--config params.json]
    python scripts/long_runs.py gridworld

``sampled`` runs 2000 ARMAC epochs per game through the ``armac solve`` CLI
into ``results/<game>_armac/``. ``gridworld`` records, for ten seeds, the first
acting episode whose return is the +2 cell, into
``results/gridworld_exploration.json``.
"""

from __future__ import annotations

import argparse
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np

from armac.trainer import ArmacTrainer, EpochConfig

RESULTS = Path(__file__).resolve().parents[1] / "results"
GAMES = ("leduc", "liars_dice", "goofspiel5")


def sampled(games, config, seed, epochs):
    for game in games:
        out = RESULTS / f"{game}_armac"
        cmd = [sys.executable, "-m", "armac", "solve", "--game", game, "--algo", "armac", "--epochs", str(epochs)]
        cmd += ["--seed", str(seed), "--eval-interval", "10", "--out", str(out)]
        if config:
            cmd += ["--config", config]
        print(" ".join(cmd), flush=True)
        subprocess.run(cmd, check=True)


def first_big_reward(seed, budget=50_000, target=2.0):
    cfg = EpochConfig()
    trainer = ArmacTrainer("gridworld", cfg, seed=seed)
    for epoch in range(math.ceil(budget / cfg.k_act)):
        stats = trainer.step_epoch()
        hits = np.flatnonzero(stats.returns[:, 0] == target)
        if len(hits):
            return epoch * cfg.k_act + int(hits[0]) + 1
    return None


def gridworld(seeds):
    first = [first_big_reward(s) for s in range(seeds)]
    RESULTS.mkdir(exist_ok=True)
    doc = {"target_reward": 2.0, "budget_episodes": 50_000, "seeds": list(range(seeds)), "first_episode": first}
    (RESULTS / "gridworld_exploration.json").write_text(json.dumps(doc, indent=1) + "\n")
    print(doc)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="what", required=True)
    p = sub.add_parser("sampled")
    p.add_argument("--games", nargs="+", default=list(GAMES), choices=GAMES)
    p.add_argument("--config", help="run configuration JSON passed to armac solve")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--epochs", type=int, default=2000)
    p = sub.add_parser("gridworld")
    p.add_argument("--seeds", type=int, default=10)
    args = parser.parse_args()
    if args.what == "sampled":
        sampled(args.games, args.config, args.seed, args.epochs)
    else:
        gridworld(args.seeds)


if __name__ == "__main__":
    main()

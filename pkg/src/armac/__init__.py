"""Regret-based self-play for imperfect-information games.

Subpackages:

- ``armac.games``: game engine (Kuhn, Leduc, Liar's Dice, Goofspiel, a gridworld)
- ``armac.exact``: compiled game trees, CFR, best responses, exact oracles
- ``armac.sampling``: episode sampling, outcome-sampling MCCFR, episode records
- ``armac.approx``: lookup-table and feedforward regressors, checkpoints
- ``armac.trainer``: the retrospective advantage-regression trainer
- ``armac.harness``: run configuration, metrics CSV, self-checks and the CLI
"""

__version__ = "0.1.0"

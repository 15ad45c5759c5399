"""ARMAC with every expectation computed exactly on an enumerable game.

Each epoch replaces the sampled pieces of the trainer by their expected
values: the critic is exact policy evaluation of pi^t, and the lookup-table
W-bar receives every history of every learner's states, each advantage weighted
by the opponents' reach under snapshot t. A lookup table never forgets, so
feeding snapshot t's contribution once, when it is created, gives the same
table as replaying all snapshots j <= t every epoch. The average policy is the
reach-weighted accumulator rather than a classification head.

With these choices pi^{t+1} = RM(W-bar) coincides with the policy tabular CFR
plays at iteration t + 1 (``compare_with_cfr``).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from armac.approx import RegressorSpec
from armac.exact import AverageAccumulator, CFRSolver, advantages, load_tree, nash_conv, node_values, reach_probabilities
from armac.exact.policy import regret_matching_rows

from .heads import Head


@dataclass
class ExactEpoch:
    epoch: int
    policy: np.ndarray  # pi^t, the policy played this epoch
    nash_conv_avg: float | None = None
    nash_conv_current: float | None = None


@dataclass
class ExactArmac:
    game_id: str
    tree: object = None
    epoch: int = 0
    history: list = field(default_factory=list)

    def __post_init__(self):
        if self.tree is None:
            self.tree = load_tree(self.game_id)
        tree = self.tree
        spec = RegressorSpec("tabular_mean", tree.descriptor.info_state_width, tree.num_actions)
        self.wbar = Head(spec)
        self.average = AverageAccumulator.zeros(tree)
        self.opp_reach = np.zeros(tree.num_infosets)  # cumulative den per information state
        self._keys = [k.data for k in tree.infoset_keys]

    def current_policy(self) -> np.ndarray:
        """pi^t = NormalizedReLU(W-bar) at every information state."""
        tree = self.tree
        return regret_matching_rows(self.wbar.predict(self._keys), tree.legal)

    def wbar_table(self) -> np.ndarray:
        return self.wbar.predict(self._keys)

    def contributions(self, policy):
        """Per-state ``(num, den)`` of snapshot ``policy`` for every player."""
        tree = self.tree
        reach = reach_probabilities(tree, policy)
        val = node_values(tree, policy)
        num = np.zeros((tree.num_infosets, tree.num_actions))
        den = np.zeros(tree.num_infosets)
        own = np.zeros(tree.num_infosets)
        for p in range(tree.num_players):
            nodes, adv = advantages(tree, policy, p, val=val)
            opp = reach.others(p)[nodes]
            sets = tree.infoset[nodes]
            for a in range(tree.num_actions):
                num[:, a] += np.bincount(sets, weights=opp * adv[:, a], minlength=tree.num_infosets)
            den += np.bincount(sets, weights=opp, minlength=tree.num_infosets)
            rows = tree.infosets_of(p)
            own[rows] = reach.own(p)[tree.infoset_representative[rows]]
        return num, den, own

    def step(self, evaluate: bool = False) -> ExactEpoch:
        tree = self.tree
        policy = self.current_policy()
        num, den, own = self.contributions(policy)
        rows = np.flatnonzero(den > 0)
        if len(rows):
            targets = num[rows] / den[rows, None]
            masks = tree.legal[rows].astype(np.float64)
            # one weighted row per state: the table's running mean becomes sum(num) / sum(den)
            self.wbar.model.train_regression_step(
                [self._keys[s] for s in rows], targets, masks, weights=den[rows]
            )
            self.wbar.clear_cache()
        self.opp_reach += den
        self.average.sums += own[:, None] * policy
        out = ExactEpoch(self.epoch, policy)
        if evaluate:
            out.nash_conv_avg = nash_conv(tree, self.average_policy())
            out.nash_conv_current = nash_conv(tree, policy)
        self.history.append(out)
        self.epoch += 1
        return out

    def average_policy(self) -> np.ndarray:
        return self.average.policy(self.tree)

    def run(self, epochs: int, eval_interval: int = 0, callback=None):
        for _ in range(epochs):
            t = self.epoch
            do_eval = eval_interval > 0 and ((t + 1) % eval_interval == 0 or t + 1 == epochs)
            stats = self.step(evaluate=do_eval)
            if callback is not None:
                callback(stats)
        return self.history


@dataclass
class EquivalenceReport:
    game_id: str
    epochs: int
    max_deviation: float  # over states with positive cumulative opponent reach
    max_deviation_all: float
    worst_epoch: int
    seconds: float

    def passed(self, tol: float = 1e-9) -> bool:
        return self.max_deviation < tol


def compare_with_cfr(game_id: str, epochs: int) -> EquivalenceReport:
    """Run exact ARMAC next to tabular CFR and compare the policies played.

    At epoch t the deviation is measured at states whose cumulative opponent
    reach over epochs 0..t-1 is positive (every state at epoch 0).
    """
    start = time.perf_counter()
    tree = load_tree(game_id)
    armac = ExactArmac(game_id, tree)
    cfr = CFRSolver(tree)
    worst, worst_all, worst_epoch = 0.0, 0.0, -1
    for t in range(epochs):
        seen = armac.opp_reach > 0 if t else np.ones(tree.num_infosets, dtype=bool)
        ours = armac.step().policy
        theirs = cfr.step()
        diff = np.abs(ours - theirs).max(axis=1)
        d = float(diff[seen].max()) if seen.any() else 0.0
        if d > worst:
            worst, worst_epoch = d, t
        worst_all = max(worst_all, float(diff.max()))
    return EquivalenceReport(game_id, epochs, worst, worst_all, worst_epoch, time.perf_counter() - start)

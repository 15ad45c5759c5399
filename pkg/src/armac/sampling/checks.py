"""Statistical comparison of the outcome-sampling estimator with exact values."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from armac.exact import PolicyTable, counterfactual_values, load_tree

from .outcome import outcome_sampling_estimate
from .trajectory import EpsilonPolicy, TablePolicy, sample_episode


@dataclass
class EstimatorCheck:
    keys: list  # (player, InfoStateKey, action)
    mean: np.ndarray
    stderr: np.ndarray
    exact: np.ndarray
    max_weight: float

    def z_scores(self) -> np.ndarray:
        diff = np.abs(self.mean - self.exact)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.stderr > 0, diff / np.where(self.stderr > 0, self.stderr, 1.0), np.where(diff > 1e-12, np.inf, 0.0))

    def within(self, k: float = 3.0) -> np.ndarray:
        return self.z_scores() <= k


def outcome_sampling_check(game_id: str, policy: np.ndarray, episodes: int, rng, epsilon: float = 0.0) -> EstimatorCheck:
    """Average q~^c over ``episodes`` samples per learner for every on-support pair.

    Each player in turn is the learner and plays ``epsilon``-mixed ``policy``;
    the others play ``policy``. Pairs with ``policy(s, a) > 0`` and positive
    opponent reach are reported.
    """
    tree = load_tree(game_id)
    table = PolicyTable.from_array(tree, policy)
    target = TablePolicy(table)
    n = tree.num_players
    index = {}
    keys = []
    exact = []
    for p in range(n):
        report = counterfactual_values(tree, policy, p)
        for s in tree.infosets_of(p):
            if report.beta[s] <= 0:
                continue
            for a in np.flatnonzero((policy[s] > 0) & tree.legal[s]):
                index[(tree.infoset_keys[s], int(a))] = len(keys)
                keys.append((p, tree.infoset_keys[s], int(a)))
                exact.append(report.q_c[s, a])
    sums = np.zeros(len(keys))
    sq = np.zeros(len(keys))
    max_weight = 0.0
    for p in range(n):
        behavior = [EpsilonPolicy(target, epsilon) if q == p else target for q in range(n)]
        for _ in range(episodes):
            traj = sample_episode(behavior, game_id, rng)
            max_weight = max(max_weight, 1.0 / traj.player_prob(p))
            for key_action, val in outcome_sampling_estimate(traj, target, p).entries.items():
                k = index.get(key_action)
                if k is not None:
                    sums[k] += val
                    sq[k] += val * val
    counts = float(episodes)
    mean = sums / counts
    var = np.maximum(sq / counts - mean**2, 0.0) * counts / max(counts - 1.0, 1.0)
    return EstimatorCheck(keys, mean, np.sqrt(var / counts), np.asarray(exact), max_weight)

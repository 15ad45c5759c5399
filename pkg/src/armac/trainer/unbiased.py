"""Sampled W-bar against the exact conditional advantage W.

Trajectories are generated the way the trainer generates them (learner on a
behavior policy, opponents on a uniformly drawn snapshot), advantage vectors
come from each snapshot's critic, and a lookup-table W-bar averages them. With
an exact critic the table is an unbiased estimate of W at every visited pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from armac.approx import TabularMean
from armac.exact import exact_q_table, exact_W_oracle, load_tree
from armac.exact.policy import as_policy_array
from armac.sampling import build_episode_record, sample_episode


class OracleSnapshot:
    """Snapshot whose policy is a fixed array and whose critic is exact q."""

    def __init__(self, tree, policy, epoch: int = 0):
        self.tree = tree
        self.epoch = epoch
        self.array = as_policy_array(tree, policy)
        self._q = exact_q_table(tree, self.array)
        self._node = {k: i for i, k in enumerate(tree.history_keys) if k is not None}
        self._row = {k: s for s, k in enumerate(tree.infoset_keys)}

    def policy(self, key, legal) -> np.ndarray:
        return self.array[self._row[key]]

    def q_values(self, history_key: bytes) -> np.ndarray:
        return self._q[self._node[history_key]]


@dataclass
class UnbiasednessReport:
    keys: list  # (InfoStateKey, action)
    estimate: np.ndarray
    exact: np.ndarray
    stderr: np.ndarray
    visits: np.ndarray

    def z_scores(self) -> np.ndarray:
        diff = np.abs(self.estimate - self.exact)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.stderr > 0, diff / np.where(self.stderr > 0, self.stderr, 1.0), np.where(diff > 1e-9, np.inf, 0.0))

    def coverage(self, k: float = 3.0) -> float:
        z = self.z_scores()
        return float(np.mean(z <= k)) if len(z) else 1.0


def random_policy(tree, rng) -> np.ndarray:
    """Random interior policy: Dirichlet(1) over the legal actions of every state."""
    out = np.zeros((tree.num_infosets, tree.num_actions))
    for s in range(tree.num_infosets):
        legal = np.flatnonzero(tree.legal[s])
        out[s, legal] = rng.dirichlet(np.ones(len(legal)))
    return out


def unbiasedness_harness(game_id: str, snapshots, player: int, episodes: int, rng, behavior=None) -> UnbiasednessReport:
    """Tabular W-bar from ``episodes`` trajectories versus ``exact_W_oracle``.

    ``snapshots`` are policy arrays; each trajectory draws one uniformly for
    the opponents. ``behavior`` is the learner's policy source (uniform over
    legal actions by default). Pairs never visited are left out.
    """
    tree = load_tree(game_id)
    snaps = [OracleSnapshot(tree, p, j) for j, p in enumerate(snapshots)]
    A = tree.num_actions
    n = tree.num_players
    mu = behavior or (lambda key, legal: legal / legal.sum())
    table = TabularMean(A)
    sums = {}
    for _ in range(episodes):
        snap = snaps[int(rng.integers(len(snaps)))]
        policies = [mu if p == player else snap.policy for p in range(n)]
        record = build_episode_record(sample_episode(policies, game_id, rng), player, snap.epoch, snap)
        for step in record.steps:
            if step.player != player:
                continue
            target = np.zeros(A)
            mask = np.zeros(A)
            target[step.legal] = step.advantages
            mask[step.legal] = 1.0
            table.train_regression_step([step.info_key.data], target[None, :], mask[None, :])
            acc = sums.setdefault(step.info_key, np.zeros((3, A)))
            acc[0] += mask
            acc[1] += target
            acc[2] += target * target
    exact = exact_W_oracle(tree, [s.array for s in snaps], player)
    keys, est, ref, se, visits = [], [], [], [], []
    for key, acc in sums.items():
        row = table.predict(key.data)
        for a in np.flatnonzero(acc[0] > 0):
            if (key, int(a)) not in exact:
                continue
            cnt = acc[0, a]
            mean = acc[1, a] / cnt
            var = max(acc[2, a] / cnt - mean * mean, 0.0) * cnt / max(cnt - 1.0, 1.0)
            keys.append((key, int(a)))
            est.append(row[a])
            ref.append(exact[(key, int(a))])
            se.append(np.sqrt(var / cnt))
            visits.append(cnt)
    return UnbiasednessReport(keys, np.array(est), np.array(ref), np.array(se), np.array(visits))

"""Outcome-sampling estimates and the tabular / regression MCCFR baselines."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from armac.exact.policy import PolicyTable, epsilon_mix, regret_matching
from armac.games import get_descriptor

from .trajectory import EpsilonPolicy, Trajectory, sample_episode


@dataclass
class SampledCFEstimate:
    """q~^c(s, a | rho) on the trajectory's (s, a) pairs; every other pair is 0."""

    entries: dict = field(default_factory=dict)
    samples: int = 1

    def __getitem__(self, key_action) -> float:
        return self.entries.get(key_action, 0.0)


def outcome_sampling_estimate(traj: Trajectory, target, learner: int) -> SampledCFEstimate:
    """Importance-corrected tail value for each learner decision on ``traj``.

    With z the terminal history and (h, a) a learner decision on it::

        q~(s, a) = eta_{-i}^pi(z) / eta_{-i}^beh(z) * eta_i^pi(ha, z) * u_i(z) / eta_i^beh(z)

    Chance is sampled from the game itself, so its factors cancel. When the
    other players act on-policy the leading ratio is 1.
    """
    steps = traj.steps
    if any(s.prob <= 0.0 for s in steps):
        raise ValueError("trajectory has a zero behavior probability")
    target_probs = np.array([target(s.info_key, s.legal)[s.action] for s in steps])
    behavior = np.array([s.prob for s in steps])
    mine = np.array([s.player == learner for s in steps])
    other_ratio = np.prod(target_probs[~mine] / behavior[~mine])
    own_behavior = np.prod(behavior[mine])
    u = traj.returns[learner]
    out = {}
    # tail products of the learner's target probabilities after each step
    tail = 1.0
    for k in range(len(steps) - 1, -1, -1):
        if mine[k]:
            s = steps[k]
            out[(s.info_key, s.action)] = out.get((s.info_key, s.action), 0.0) + other_ratio * tail * u / own_behavior
            tail *= target_probs[k]
    return SampledCFEstimate(out)


class _Tables:
    """Dict-backed regret and average-policy sums for the tabular baseline."""

    def __init__(self, num_actions):
        self.num_actions = num_actions
        self.regret: dict = {}
        self.avg: dict = {}
        self._cache: dict = {}

    def policy(self, key, legal):
        p = self._cache.get(key)
        if p is None:
            r = self.regret.get(key)
            p = legal / legal.sum() if r is None else regret_matching(r, legal)
            self._cache[key] = p
        return p

    def add_regret(self, key, delta):
        self._cache.pop(key, None)
        r = self.regret.get(key)
        self.regret[key] = delta.copy() if r is None else r + delta

    def add_avg(self, key, probs):
        s = self.avg.get(key)
        self.avg[key] = probs.copy() if s is None else s + probs

    def average_table(self) -> PolicyTable:
        table = PolicyTable(self.num_actions)
        for key, s in self.avg.items():
            total = s.sum()
            if total > 0:
                table[key] = s / total
        return table


def _os_update(traj: Trajectory, policy, learner: int, add_regret, add_avg):
    """Regret and average-policy increments from one outcome-sampled episode.

    Sampled regret for the learner at (s, b): q~(s, b) - sum_a pi(s, a) q~(s, a),
    where only the taken action has a non-zero q~. The average policy of the
    other (on-policy) players is accumulated with unit weight at every visit.
    """
    est = outcome_sampling_estimate(traj, policy, learner)
    for s in traj.steps:
        pi = policy(s.info_key, s.legal)
        if s.player == learner:
            q = np.zeros_like(pi)
            q[s.action] = est[(s.info_key, s.action)]
            add_regret(s.info_key, s.legal, (q - pi[s.action] * q[s.action]) * s.legal)
        else:
            add_avg(s.info_key, pi)


def mccfr_outcome_sampling_run(
    game: str,
    iterations: int,
    epsilon: float,
    rng: np.random.Generator,
    eval_every: int = 0,
    evaluate=None,
    callback=None,
):
    """Tabular outcome-sampling MCCFR with an epsilon-on-policy learner.

    Each iteration samples one episode per player. Returns
    ``(average PolicyTable, [(iteration, NashConv), ...])``; the trace is only
    filled when ``eval_every`` and ``evaluate`` (a PolicyTable -> float
    callable) are given. ``callback(iteration, average table, acting steps)``
    is called at the same points.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must be in (0, 1]")
    n = get_descriptor(game).num_players
    tables = _Tables(get_descriptor(game).max_actions)
    trace = []
    steps = 0
    for it in range(1, iterations + 1):
        for learner in range(n):
            behavior = [EpsilonPolicy(tables.policy, epsilon) if p == learner else tables.policy for p in range(n)]
            traj = sample_episode(behavior, game, rng)
            steps += len(traj.steps)
            _os_update(
                traj,
                tables.policy,
                learner,
                lambda k, legal, d: tables.add_regret(k, d),
                tables.add_avg,
            )
        if eval_every and (it % eval_every == 0 or it == iterations):
            if evaluate is not None:
                trace.append((it, float(evaluate(tables.average_table()))))
            if callback is not None:
                callback(it, tables.average_table(), steps)
    return tables.average_table(), trace


class Reservoir:
    """Classic reservoir sample (Algorithm R) of bounded capacity."""

    def __init__(self, capacity: int, rng: np.random.Generator):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.items: list = []
        self.seen = 0
        self.rng = rng

    def add(self, item) -> int | None:
        """Insert ``item``; returns the slot it landed in, or None if dropped."""
        self.seen += 1
        if len(self.items) < self.capacity:
            self.items.append(item)
            return len(self.items) - 1
        j = int(self.rng.integers(self.seen))
        if j < self.capacity:
            self.items[j] = item
            return j
        return None

    def __len__(self):
        return len(self.items)


def mc_rcfr_run(
    game: str,
    iterations: int,
    epsilon: float,
    rng: np.random.Generator,
    regressor=None,
    episodes_per_iteration: int = 1,
    memory: int = 100_000,
    train_steps: int = 100,
    batch_size: int = 64,
    eval_every: int = 0,
    evaluate=None,
    callback=None,
):
    """Regression CFR driven by outcome-sampled regrets.

    The regressor predicts a per-state multiple of the cumulative regret.
    With the default lookup table this is an incremental mean of sampled
    regrets, which regret matching treats exactly like their sum. A
    feedforward regressor is instead refit every iteration on a reservoir of
    past samples.
    """
    from armac.approx import TabularMean

    desc = get_descriptor(game)
    n, width = desc.num_players, desc.max_actions
    tabular = regressor is None or isinstance(regressor, TabularMean)
    model = regressor if regressor is not None else TabularMean(width)
    memory_buf = None if tabular else Reservoir(memory, rng)
    avg = _Tables(width)
    cache: dict = {}

    def policy(key, legal):
        p = cache.get(key)
        if p is None:
            feat = key.data if tabular else np.frombuffer(key.data, dtype=np.uint8).astype(np.float64)
            p = regret_matching(model.predict(feat), legal)
            cache[key] = p
        return p

    def add_regret(key, legal, delta):
        if tabular:
            model.train_regression_step([key.data], delta[None, :], legal[None, :])
        else:
            memory_buf.add((np.frombuffer(key.data, dtype=np.uint8).astype(np.float64), delta, legal))

    trace = []
    steps = 0
    for it in range(1, iterations + 1):
        for _ in range(episodes_per_iteration):
            for learner in range(n):
                behavior = [EpsilonPolicy(policy, epsilon) if p == learner else policy for p in range(n)]
                traj = sample_episode(behavior, game, rng)
                steps += len(traj.steps)
                _os_update(traj, policy, learner, add_regret, avg.add_avg)
        if not tabular and len(memory_buf):
            for _ in range(train_steps):
                idx = rng.integers(len(memory_buf), size=min(batch_size, len(memory_buf)))
                feats, targets, masks = zip(*(memory_buf.items[i] for i in idx))
                model.train_regression_step(np.stack(feats), np.stack(targets), np.stack(masks))
        cache.clear()
        if eval_every and (it % eval_every == 0 or it == iterations):
            if evaluate is not None:
                trace.append((it, float(evaluate(avg.average_table()))))
            if callback is not None:
                callback(it, avg.average_table(), steps)
    return avg.average_table(), trace


__all__ = [
    "Reservoir",
    "SampledCFEstimate",
    "epsilon_mix",
    "mc_rcfr_run",
    "mccfr_outcome_sampling_run",
    "outcome_sampling_estimate",
]

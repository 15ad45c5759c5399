"""Exploration candidates and the per-episode behavior policy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from armac.exact.policy import epsilon_mix

from .config import EPSILONS


@dataclass
class CandidatePolicy:
    kind: str  # uniform | current_regret | mean_regret | average
    epsilon: float = 0.0
    mean_return: float | None = None
    evaluations: int = 0

    @property
    def name(self) -> str:
        return self.kind if self.kind in ("uniform", "average") else f"{self.kind}({self.epsilon:g})"

    def source(self, snapshot):
        """Policy source for this candidate built on ``snapshot``'s heads."""
        eps = self.epsilon
        if self.kind == "uniform":
            return lambda key, legal: legal / legal.sum()
        if self.kind == "average":
            return snapshot.avg_policy
        base = snapshot.regret_policy if self.kind == "current_regret" else snapshot.policy
        if eps == 0.0:
            return base
        return lambda key, legal: epsilon_mix(base(key, legal), eps, legal)

    def record(self, value: float, decay: float) -> None:
        if self.mean_return is None or decay == 0.0:
            self.mean_return = value
        else:
            self.mean_return = decay * self.mean_return + (1 - decay) * value
        self.evaluations += 1


def default_candidates() -> list[CandidatePolicy]:
    out = [CandidatePolicy("uniform")]
    out += [CandidatePolicy("current_regret", e) for e in EPSILONS]
    out += [CandidatePolicy("mean_regret", e) for e in EPSILONS]
    out.append(CandidatePolicy("average"))
    return out


def primary_index(candidates) -> int:
    """Argmax of running returns; ties (and unevaluated runs) go to the lowest index."""
    scores = [c.mean_return if c.mean_return is not None else -np.inf for c in candidates]
    return int(np.argmax(scores))


def evaluate_candidates(game, candidates, latest, episodes: int, seed_root, decay: float, sampler=None) -> list[float]:
    """Mean return of each candidate against the average-policy opponent.

    Seats alternate over the episodes and the seat returns are averaged.
    Every candidate sees the same per-episode random streams, so the
    comparison is made under common random numbers.
    """
    from armac.sampling import sample_episode

    sampler = sampler or sample_episode
    n = latest.num_players
    means = []
    for cand in candidates:
        mine = cand.source(latest)
        total = 0.0
        for k in range(episodes):
            seat = k % n
            behavior = [mine if p == seat else latest.avg_policy for p in range(n)]
            rng = np.random.default_rng(np.random.SeedSequence(list(seed_root) + [k]))
            total += sampler(behavior, game, rng).returns[seat]
        value = total / episodes if episodes else 0.0
        if episodes:
            cand.record(value, decay)
        means.append(value)
    return means


def select_candidate(candidates, latest, game, episodes, seed_root, decay=0.0) -> int:
    evaluate_candidates(game, candidates, latest, episodes, seed_root, decay)
    return primary_index(candidates)


@dataclass
class BehaviorChoice:
    candidate: int
    primary: bool
    source_epoch: int
    policy: object


def build_behavior(latest, reservoir, candidates, primary: int, rng, primary_share=0.5, latest_share=0.5):
    """Draw the learner's behavior policy for one episode.

    The primary candidate is used with probability ``primary_share``, otherwise
    a candidate is drawn uniformly. The snapshot it modulates is the latest one
    with probability ``latest_share``, otherwise a uniform reservoir draw.
    """
    if rng.random() < primary_share:
        c = primary
    else:
        c = int(rng.integers(len(candidates)))
    base = latest
    if len(reservoir) and rng.random() >= latest_share:
        base = reservoir.sample(rng)
    return BehaviorChoice(c, c == primary, base.epoch, candidates[c].source(base))

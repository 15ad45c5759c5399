"""Vanilla (simultaneous-update) tabular CFR over a compiled tree."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from armac.exact.policy import PolicyTable, regret_matching_rows
from armac.exact.values import counterfactual_values, node_values, reach_probabilities


@dataclass
class RegretTable:
    regrets: np.ndarray
    visits: np.ndarray

    @classmethod
    def zeros(cls, tree) -> "RegretTable":
        return cls(np.zeros((tree.num_infosets, tree.num_actions)), np.zeros(tree.num_infosets, dtype=np.int64))

    def policy(self, tree) -> np.ndarray:
        return regret_matching_rows(self.regrets, tree.legal)


@dataclass
class AverageAccumulator:
    sums: np.ndarray

    @classmethod
    def zeros(cls, tree) -> "AverageAccumulator":
        return cls(np.zeros((tree.num_infosets, tree.num_actions)))

    def policy(self, tree) -> np.ndarray:
        total = self.sums.sum(axis=1, keepdims=True)
        uniform = tree.uniform_policy()
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(total > 0, self.sums / np.where(total > 0, total, 1.0), uniform)


def immediate_regrets(tree, policy: np.ndarray, reach=None, val=None) -> np.ndarray:
    """``q^c(s, a) - v^c(s)`` for every information state (each for its own player)."""
    if reach is None:
        reach = reach_probabilities(tree, policy)
    if val is None:
        val = node_values(tree, policy)
    out = np.zeros((tree.num_infosets, tree.num_actions))
    for p in range(tree.num_players):
        rep = counterfactual_values(tree, policy, p, reach=reach, val=val)
        rows = rep.infosets
        out[rows] = np.where(tree.legal[rows], rep.q_c[rows] - rep.v_c[rows, None], 0.0)
    return out


def cfr_iteration(regrets: RegretTable, avg: AverageAccumulator, tree) -> np.ndarray:
    """One CFR iteration, updating both tables in place; returns pi^t."""
    policy = regrets.policy(tree)
    reach = reach_probabilities(tree, policy)
    val = node_values(tree, policy)
    regrets.regrets += immediate_regrets(tree, policy, reach=reach, val=val)
    regrets.visits += 1
    own = np.zeros(tree.num_infosets)
    for p in range(tree.num_players):
        rows = tree.infosets_of(p)
        own[rows] = reach.own(p)[tree.infoset_representative[rows]]
    avg.sums += own[:, None] * policy
    return policy


@dataclass
class CFRSolver:
    tree: object
    regrets: RegretTable = field(init=False)
    average: AverageAccumulator = field(init=False)
    iteration: int = 0

    def __post_init__(self):
        self.regrets = RegretTable.zeros(self.tree)
        self.average = AverageAccumulator.zeros(self.tree)

    def current_policy(self) -> np.ndarray:
        """The policy the next iteration will play."""
        return self.regrets.policy(self.tree)

    def average_policy(self) -> np.ndarray:
        return self.average.policy(self.tree)

    def step(self) -> np.ndarray:
        self.iteration += 1
        return cfr_iteration(self.regrets, self.average, self.tree)

    def run(self, iterations: int) -> "CFRSolver":
        for _ in range(iterations):
            self.step()
        return self

    def average_policy_table(self) -> PolicyTable:
        return PolicyTable.from_array(self.tree, self.average_policy())

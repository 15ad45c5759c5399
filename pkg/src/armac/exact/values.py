"""Exact tree walks: reach probabilities, values, counterfactual values,
best responses and NashConv.

Every function takes a :class:`~armac.exact.tree.GameTree` and a joint policy
given either as a :class:`PolicyTable` or as a dense ``(num_infosets,
max_actions)`` array aligned with the tree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from armac.exact.policy import PolicyTable, as_policy_array


@dataclass
class Reach:
    """Per-node reach contributions; row ``n`` (the last) is chance."""

    contributions: np.ndarray

    def own(self, player: int) -> np.ndarray:
        return self.contributions[player]

    def others(self, player: int) -> np.ndarray:
        """eta_{-i}(h): opponents and chance."""
        mask = np.arange(self.contributions.shape[0]) != player
        return np.prod(self.contributions[mask], axis=0)

    @property
    def total(self) -> np.ndarray:
        return np.prod(self.contributions, axis=0)


def reach_probabilities(tree, policy, edge: np.ndarray | None = None) -> Reach:
    policy = as_policy_array(tree, policy)
    e = tree.edge_probs(policy) if edge is None else edge
    reach = np.ones((tree.num_players + 1, tree.num_nodes))
    for d in range(1, tree.max_depth + 1):
        nodes = tree.levels[d]
        reach[:, nodes] = reach[:, tree.parent[nodes]]
        reach[tree.edge_actor[nodes], nodes] *= e[nodes]
    return Reach(reach)


def node_values(tree, policy, edge: np.ndarray | None = None) -> np.ndarray:
    """Expected utility of every node for every player, ``(num_nodes, n)``."""
    policy = as_policy_array(tree, policy)
    e = tree.edge_probs(policy) if edge is None else edge
    val = tree.utilities.copy()
    for d in range(tree.max_depth, 0, -1):
        nodes = tree.levels[d]
        contrib = e[nodes, None] * val[nodes]
        val[tree.level_parents[d]] = np.add.reduceat(contrib, tree.level_starts[d], axis=0)
    return val


def expected_values(tree, policy) -> tuple[np.ndarray, np.ndarray]:
    """Game value per player and the per-node value table."""
    val = node_values(tree, policy)
    return val[0].copy(), val


def child_values(tree, val: np.ndarray, nodes: np.ndarray, player: int) -> np.ndarray:
    """``q_i(h, a)`` for the given decision nodes; 0 at illegal actions."""
    kids = tree.children[nodes, : tree.num_actions]
    return np.where(kids >= 0, val[np.maximum(kids, 0), player], 0.0)


def advantages(tree, policy, player: int, val: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """``A_i(h, a) = q_i(h, a) - v_i(h)`` at every decision node of ``player``.

    Returns ``(nodes, A)`` with ``A`` of shape ``(len(nodes), max_actions)``.
    """
    if val is None:
        val = node_values(tree, policy)
    nodes = tree.player_nodes[player]
    q = child_values(tree, val, nodes, player)
    legal = tree.legal[tree.infoset[nodes]]
    return nodes, np.where(legal, q - val[nodes, player][:, None], 0.0)


def _aggregate(tree, player: int, weights: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Sum per-node rows into their information states."""
    sets = tree.player_node_infosets[player]
    out = np.zeros((tree.num_infosets,) + rows.shape[1:])
    if rows.ndim == 1:
        out += np.bincount(sets, weights=weights * rows, minlength=tree.num_infosets)
        return out
    for a in range(rows.shape[1]):
        out[:, a] = np.bincount(sets, weights=weights * rows[:, a], minlength=tree.num_infosets)
    return out


@dataclass
class CFValueReport:
    """Counterfactual values of one player, rows aligned with tree infosets.

    Rows of information states belonging to other players are zero.
    """

    player: int
    q_c: np.ndarray
    v_c: np.ndarray
    beta: np.ndarray
    infosets: np.ndarray

    def values(self) -> np.ndarray:
        """Standard state values ``v^c / beta`` (NaN where beta == 0)."""
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.beta > 0, self.v_c / np.where(self.beta > 0, self.beta, 1.0), np.nan)

    def as_dicts(self, tree):
        keys = [tree.infoset_keys[s] for s in self.infosets]
        q = {(k, a): self.q_c[s, a] for k, s in zip(keys, self.infosets) for a in np.flatnonzero(tree.legal[s])}
        return q, dict(zip(keys, self.v_c[self.infosets])), dict(zip(keys, self.beta[self.infosets]))


def counterfactual_values(tree, policy, player: int, reach: Reach | None = None, val=None) -> CFValueReport:
    policy = as_policy_array(tree, policy)
    if reach is None:
        reach = reach_probabilities(tree, policy)
    if val is None:
        val = node_values(tree, policy)
    nodes = tree.player_nodes[player]
    w = reach.others(player)[nodes]
    q = child_values(tree, val, nodes, player)
    q_c = _aggregate(tree, player, w, q)
    v_c = _aggregate(tree, player, w, val[nodes, player])
    beta = _aggregate(tree, player, w, np.ones(len(nodes)))
    return CFValueReport(player, q_c, v_c, beta, tree.infosets_of(player))


def best_response_array(tree, policy, player: int) -> tuple[float, np.ndarray]:
    """Best-response value and a deterministic best-response policy array.

    Rows of ``player``'s information states are one-hot (ties go to the
    lowest action id); other rows keep ``policy``.
    """
    policy = as_policy_array(tree, policy)
    e = tree.edge_probs(policy)
    opp = reach_probabilities(tree, policy, edge=e).others(player)
    br = tree.utilities[:, player].copy()
    choice = np.zeros(tree.num_infosets, dtype=np.int64)
    levels = tree.player_level_nodes[player]
    for d in range(tree.max_depth, 0, -1):
        nodes = tree.levels[d]
        br[tree.level_parents[d]] = np.add.reduceat(e[nodes] * br[nodes], tree.level_starts[d])
        mine = levels.get(d - 1)
        if mine is None:
            continue
        sets = tree.infoset[mine]
        kids = tree.children[mine, : tree.num_actions]
        q = np.where(kids >= 0, br[np.maximum(kids, 0)], 0.0)
        q_c = np.zeros((tree.num_infosets, tree.num_actions))
        for a in range(tree.num_actions):
            q_c[:, a] = np.bincount(sets, weights=opp[mine] * q[:, a], minlength=tree.num_infosets)
        uniq = np.unique(sets)
        masked = np.where(tree.legal[uniq], q_c[uniq], -np.inf)
        choice[uniq] = np.argmax(masked, axis=1)
        br[mine] = q[np.arange(len(mine)), choice[sets]]
    out = policy.copy()
    rows = tree.infosets_of(player)
    out[rows] = 0.0
    out[rows, choice[rows]] = 1.0
    return float(br[0]), out


def best_response(tree, policy, player: int) -> tuple[float, PolicyTable]:
    value, arr = best_response_array(tree, policy, player)
    return value, PolicyTable.from_array(tree, arr, players=[player])


@dataclass
class NashConvReport:
    nash_conv: float
    br_values: np.ndarray
    values: np.ndarray

    @property
    def deviation_incentives(self) -> np.ndarray:
        return self.br_values - self.values


def nash_conv_report(tree, policy) -> NashConvReport:
    policy = as_policy_array(tree, policy)
    values = node_values(tree, policy)[0]
    br = np.array([best_response_array(tree, policy, p)[0] for p in range(tree.num_players)])
    return NashConvReport(float(np.sum(br - values)), br, values)


def nash_conv(tree, policy) -> float:
    """Sum over players of the gain from deviating to a best response."""
    return nash_conv_report(tree, policy).nash_conv

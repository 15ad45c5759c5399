"""Ground-truth quantities for the equivalence and unbiasedness checks.

``exact_W_oracle`` follows the history-level construction: advantages of
each snapshot at every history, weighted by the opponents' reach and
normalized per information state. ``cumulative_regret_oracle`` walks the game
recursively over ``GameState`` objects and shares no code with the
vectorized tree passes.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from armac.exact.policy import PolicyTable, as_policy_array
from armac.exact.values import advantages, node_values, reach_probabilities
from armac.games import new_initial_state


def exact_W_oracle(tree, snapshots, player: int) -> dict:
    """Conditional advantage W^T(s, a) of ``player`` over a sequence of joint policies.

    Information states whose cumulative opponent reach is zero are omitted.
    Returns ``{(InfoStateKey, action): W}``.
    """
    num, den = _w_sums(tree, snapshots, player)
    out = {}
    for s in np.flatnonzero(den > 0):
        key = tree.infoset_keys[s]
        for a in np.flatnonzero(tree.legal[s]):
            out[(key, int(a))] = num[s, a] / den[s]
    return out


def exact_W_array(tree, snapshots, player: int) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``(W, w)`` with ``w(s)`` the cumulative opponent reach; W is 0 where w is 0."""
    num, den = _w_sums(tree, snapshots, player)
    with np.errstate(invalid="ignore", divide="ignore"):
        W = np.where(den[:, None] > 0, num / np.where(den > 0, den, 1.0)[:, None], 0.0)
    return W, den


def _w_sums(tree, snapshots, player):
    num = np.zeros((tree.num_infosets, tree.num_actions))
    den = np.zeros(tree.num_infosets)
    for pol in snapshots:
        pol = as_policy_array(tree, pol)
        nodes, adv = advantages(tree, pol, player)
        opp = reach_probabilities(tree, pol).others(player)[nodes]
        sets = tree.infoset[nodes]
        for a in range(tree.num_actions):
            num[:, a] += np.bincount(sets, weights=opp * adv[:, a], minlength=tree.num_infosets)
        den += np.bincount(sets, weights=opp, minlength=tree.num_infosets)
    return num, den


def cumulative_regret_oracle(game_id: str, snapshots, player: int) -> dict:
    """Exact R^T(s, a) for ``player`` by recursive counterfactual-value walks.

    ``snapshots`` are :class:`PolicyTable` objects (or anything with
    ``.get(key)``); missing keys play uniformly. Returns
    ``{InfoStateKey: regret vector}`` over all action ids.
    """
    totals: dict = defaultdict(lambda: None)
    for pol in snapshots:
        regrets: dict = {}
        _walk(new_initial_state(game_id), pol, player, 1.0, regrets)
        for key, r in regrets.items():
            totals[key] = r if totals[key] is None else totals[key] + r
    return dict(totals)


def _policy_at(pol, state, key):
    probs = pol.get(key) if pol is not None else None
    if probs is None:
        legal = state.legal_actions()
        probs = np.zeros(state.descriptor.max_actions)
        probs[legal] = 1.0 / len(legal)
    return np.asarray(probs, dtype=np.float64)


def _walk(state, pol, player, opp_reach, regrets):
    """Return the value of ``state`` for ``player``; accumulate cf regrets."""
    if state.is_terminal():
        return state.returns()[player]
    if state.is_chance():
        return sum(p * _walk(state.child(a), pol, player, opp_reach * p, regrets) for a, p in state.chance_outcomes())
    cur = state.current_player()
    key = state.info_state_key(cur)
    probs = _policy_at(pol, state, key)
    legal = state.legal_actions()
    if cur != player:
        return sum(probs[a] * _walk(state.child(a), pol, player, opp_reach * probs[a], regrets) for a in legal)
    q = np.zeros(state.descriptor.max_actions)
    for a in legal:
        q[a] = _walk(state.child(a), pol, player, opp_reach, regrets)
    v = float(probs @ q)
    r = np.zeros_like(q)
    r[legal] = opp_reach * (q[legal] - v)
    regrets[key] = regrets[key] + r if key in regrets else r
    return v


def policy_tables_from_arrays(tree, arrays) -> list[PolicyTable]:
    return [PolicyTable.from_array(tree, a) for a in arrays]


def exact_q_table(tree, policy) -> np.ndarray:
    """Exact ``q_i(h, a)`` for all players at every node, ``(num_nodes, n, max_actions)``.

    Rows of non-decision nodes are zero. This is the zero-error fixed point
    a tabular critic of ``policy`` converges to.
    """
    val = node_values(tree, policy)
    q = np.zeros((tree.num_nodes, tree.num_players, tree.num_actions))
    nodes = tree.decision_nodes
    kids = tree.children[nodes, : tree.num_actions]
    ok = kids >= 0
    for p in range(tree.num_players):
        q[nodes, p] = np.where(ok, val[np.maximum(kids, 0), p], 0.0)
    return q

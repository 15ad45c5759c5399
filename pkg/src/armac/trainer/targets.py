"""Tree-Backup(lambda) critic targets.

Undiscounted and episodic; rewards are zero until the terminal utility.
Chance moves are part of the environment, so only decision steps appear.
With ``h'`` the next decision history, ``a'`` the action taken there and pi
the target joint policy::

    G(h, a) = v(h') + lam * pi(a' | s') * (G(h', a') - q(h', a'))
    v(h')   = sum_b pi(b | s') q(h', b)

and ``G = u(z)`` at the last decision. A truncated episode bootstraps the
last target from ``v`` of the history it was cut at.
"""

from __future__ import annotations

import numpy as np

from armac.exact.tree import load_tree
from armac.games import new_initial_state


def _mask(legal, num_actions) -> np.ndarray:
    legal = np.asarray(legal)
    if legal.dtype == bool and len(legal) == num_actions:
        return legal
    m = np.zeros(num_actions, dtype=bool)
    m[legal] = True
    return m


def episode_inputs(ep, num_actions):
    """History keys, policy-lookup info and actions along an episode.

    Works for both :class:`Trajectory` and :class:`EpisodeRecord` objects.
    A truncated episode contributes one extra bootstrap row at the end.
    """
    hkeys = [s.history_key for s in ep.steps]
    infos = [(s.info_key, _mask(s.legal, num_actions)) for s in ep.steps]
    actions = [s.action for s in ep.steps]
    if ep.truncated:
        hkeys.append(ep.final_history_key)
        infos.append((ep.final_info_key, _mask(ep.final_legal, num_actions)))
    return hkeys, infos, actions


def backup(q: np.ndarray, pi: np.ndarray, actions, returns, truncated: bool, lam: float) -> np.ndarray:
    """Targets for one episode from precomputed critic rows.

    ``q`` is ``(rows, n, A)`` and ``pi`` ``(rows, A)``, one row per decision
    step plus the bootstrap row when ``truncated``. Returns ``(steps, n)``.
    """
    m = len(actions)
    out = np.empty((m, q.shape[1]))
    if truncated:
        g = q[m] @ pi[m]
    else:
        g = np.asarray(returns, dtype=np.float64)
    out[m - 1] = g
    for k in range(m - 2, -1, -1):
        a = actions[k + 1]
        v = q[k + 1] @ pi[k + 1]
        g = v + lam * pi[k + 1, a] * (g - q[k + 1, :, a])
        out[k] = g
    return out


def tree_backup_targets(episode, critic, target_policy, lam: float) -> np.ndarray:
    """Per-step, per-player Tree-Backup(lambda) targets for q(h_k, a_k).

    ``critic(history_keys)`` returns ``(rows, n, A)`` action values and
    ``target_policy(key, legal_mask)`` a distribution.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must be in [0, 1]")
    if not episode.steps:
        return np.zeros((0, len(episode.returns)))
    q = np.asarray(critic(_hkeys(episode)))
    _, infos, actions = episode_inputs(episode, q.shape[2])
    pi = np.stack([target_policy(k, m) for k, m in infos])
    return backup(q, pi, actions, episode.returns, episode.truncated, lam)


def _hkeys(ep):
    keys = [s.history_key for s in ep.steps]
    if ep.truncated:
        keys.append(ep.final_history_key)
    return keys


# -- exact fixed point on small games -----------------------------------------


def enumerate_episodes(game_id: str, behavior):
    """Every terminal episode of ``behavior`` with its probability.

    Yields ``(probability, Trajectory)``; only practical for small games.
    """
    from armac.sampling.trajectory import Step, Trajectory

    out = []

    def walk(state, prob, steps):
        if state.is_terminal():
            out.append((prob, Trajectory(list(steps), np.asarray(state.returns(), dtype=np.float64))))
            return
        if state.is_chance():
            for a, p in state.chance_outcomes():
                walk(state.child(a), prob * p, steps)
            return
        p = state.current_player()
        key = state.info_state_key(p)
        legal = state.legal_mask()
        dist = np.asarray(behavior(key, legal), dtype=np.float64)
        for a in np.flatnonzero(dist > 0):
            steps.append(Step(state.history_key(), key, p, int(a), float(dist[a]), dist, legal))
            walk(state.child(int(a)), prob * dist[a], steps)
            steps.pop()

    walk(new_initial_state(game_id), 1.0, [])
    return out


def tree_backup_fixed_point(game_id: str, target, behavior, lam: float, tol: float = 1e-13, max_sweeps: int = 500):
    """Tabular critic iterated to the expected Tree-Backup fixed point.

    Each sweep replaces q(h, a) by the behavior-weighted mean of its targets
    over all episodes, which is what a lookup-table critic trained on
    infinitely many behavior episodes converges to. Returns
    ``(q dict {history_key: (n, A)}, sweeps used)``.
    """
    from armac.approx import TabularMean

    episodes = enumerate_episodes(game_id, behavior)
    n = len(episodes[0][1].returns)
    num_actions = len(episodes[0][1].steps[0].legal)
    q: dict = {}

    def critic(keys):
        return np.stack([q.get(k, np.zeros((n, num_actions))) for k in keys])

    for sweep in range(1, max_sweeps + 1):
        table = TabularMean(n * num_actions)
        for prob, ep in episodes:
            targets = tree_backup_targets(ep, critic, target, lam)
            for step, g in zip(ep.steps, targets):
                t = np.zeros((n, num_actions))
                m = np.zeros((n, num_actions))
                t[:, step.action] = g
                m[:, step.action] = 1.0
                table.train_regression_step([step.history_key], t.reshape(1, -1), m.reshape(1, -1), np.array([prob]))
        new = {}
        for key, row in table.index.items():
            prev = q.get(key, np.zeros((n, num_actions)))
            filled = table._weights[row].reshape(n, num_actions) > 0
            new[key] = np.where(filled, table._means[row].reshape(n, num_actions), prev)
        change = max((np.abs(new[k] - q.get(k, 0.0)).max() for k in new), default=0.0)
        q = new
        if change < tol:
            return q, sweep
    return q, max_sweeps


def exact_q_by_history(game_id: str, policy_array) -> dict:
    """Exact q(h, .) for every decision history, keyed by history bytes."""
    from armac.exact import exact_q_table

    tree = load_tree(game_id)
    q = exact_q_table(tree, policy_array)
    return {tree.history_keys[h]: q[h] for h in tree.decision_nodes}

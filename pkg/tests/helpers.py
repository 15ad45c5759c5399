"""Independent oracles for the tests: plain recursion over GameState objects.

Nothing here touches the compiled tree, so agreement with the vectorized
passes is a genuine cross-check.
"""

import itertools

import numpy as np

from armac.exact import PolicyTable
from armac.games import new_initial_state


def probs_at(policy, state, player):
    key = state.info_state_key(player)
    p = policy.get(key) if policy is not None else None
    if p is None:
        legal = state.legal_actions()
        p = np.zeros(state.descriptor.max_actions)
        p[legal] = 1.0 / len(legal)
    return np.asarray(p)


def terminal_distribution(game_id, policy):
    """List of (probability, returns) over every terminal history."""
    out = []

    def walk(state, prob):
        if state.is_terminal():
            out.append((prob, state.returns()))
            return
        if state.is_chance():
            for a, p in state.chance_outcomes():
                walk(state.child(a), prob * p)
            return
        pr = probs_at(policy, state, state.current_player())
        for a in state.legal_actions():
            if pr[a] > 0:
                walk(state.child(a), prob * pr[a])

    walk(new_initial_state(game_id), 1.0)
    return out


def enumerate_values(game_id, policy):
    return sum(p * u for p, u in terminal_distribution(game_id, policy))


def infostates(game_id, player):
    """Every information state of ``player`` with its legal actions, by enumeration."""
    found = {}

    def walk(state):
        if state.is_terminal():
            return
        if not state.is_chance() and state.current_player() == player:
            found[state.info_state_key(player)] = state.legal_actions()
        for a in state.legal_actions():
            walk(state.child(a))

    walk(new_initial_state(game_id))
    return found


def pure_strategies(game_id, player):
    sets = infostates(game_id, player)
    keys = sorted(sets, key=lambda k: k.data)
    num_actions = new_initial_state(game_id).descriptor.max_actions
    for choice in itertools.product(*[sets[k] for k in keys]):
        table = PolicyTable(num_actions)
        for k, a in zip(keys, choice):
            v = np.zeros(num_actions)
            v[a] = 1.0
            table[k] = v
        yield table


def combine(base, override):
    out = PolicyTable(base.num_actions, dict(base.entries))
    out.entries.update(override.entries)
    return out


def brute_force_best_response(game_id, policy, player):
    """max over pure strategies of the player's expected value."""
    return max(enumerate_values(game_id, combine(policy, s))[player] for s in pure_strategies(game_id, player))


def random_policy_array(tree, rng, concentration=1.0):
    pol = rng.dirichlet(np.full(tree.num_actions, concentration), size=tree.num_infosets) * tree.legal
    return pol / pol.sum(axis=1, keepdims=True)


def kuhn_nash(alpha=0.0):
    """Closed-form Kuhn equilibrium family (player 0 bets J with prob alpha)."""
    from armac.exact import load_tree

    tree = load_tree("kuhn")
    pol = np.zeros((tree.num_infosets, 2))
    for s in range(tree.num_infosets):
        state = _state_of(tree, tree.infoset_representative[s])
        card = state.cards[state.current_player()]
        hist = state.actions
        if hist == ():
            bet = [alpha, 0.0, 3 * alpha][card]
        elif hist == (0,):
            bet = [1 / 3, 0.0, 1.0][card]
        elif hist == (1,):
            bet = [0.0, 1 / 3, 1.0][card]
        else:  # (pass, bet): player 0 calls or folds
            bet = [0.0, alpha + 1 / 3, 1.0][card]
        pol[s] = [1 - bet, bet]
    return pol


def _state_of(tree, node):
    path = []
    while tree.parent[node] >= 0:
        path.append(int(tree.parent_action[node]))
        node = tree.parent[node]
    state = new_initial_state(tree.game_id)
    for a in reversed(path):
        state.apply_action(a)
    return state


state_of_node = _state_of


def q_learning_finds_cell(seed, episodes, target=2.0, epsilon=0.01, step_size=0.1, gamma=1.0):
    """Epsilon-greedy tabular Q-learning on the gridworld.

    Returns the 1-based episode at which an episode first ends with reward
    ``target``, or None. Greedy ties go to the lowest action index.
    """
    from armac.games import new_initial_state

    rng = np.random.default_rng(seed)
    q = {}
    for ep in range(1, episodes + 1):
        state = new_initial_state("gridworld")
        s = state.info_state_key(0).data
        while not state.is_terminal():
            row = q.setdefault(s, np.zeros(4))
            a = int(rng.integers(4)) if rng.random() < epsilon else int(np.argmax(row))
            state.apply_action(a)
            if state.is_terminal():
                r = float(state.returns()[0])
                row[a] += step_size * (r - row[a])
                if r == target:
                    return ep
                break
            s2 = state.info_state_key(0).data
            row[a] += step_size * (gamma * q.setdefault(s2, np.zeros(4)).max() - row[a])
            s = s2
    return None

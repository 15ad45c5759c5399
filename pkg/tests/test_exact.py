import copy

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from armac.exact import (
    CFRSolver,
    PolicyTable,
    best_response,
    counterfactual_values,
    cumulative_regret_oracle,
    exact_W_array,
    exact_W_oracle,
    expected_values,
    immediate_regrets,
    load_tree,
    nash_conv,
    nash_conv_report,
    perfect_recall_violations,
    reach_probabilities,
    regret_matching,
    regret_matching_rows,
)
from armac.exact.tree import GameTree, TreeTooLarge
from helpers import (
    brute_force_best_response,
    enumerate_values,
    kuhn_nash,
    random_policy_array,
    state_of_node,
)

KUHN_VALUE = np.array([-1 / 18, 1 / 18])


# -- regret matching ---------------------------------------------------------

def test_regret_matching_examples():
    np.testing.assert_allclose(regret_matching([2, -1, 3]), [0.4, 0, 0.6])
    np.testing.assert_allclose(regret_matching([-1, -2]), [0.5, 0.5])
    np.testing.assert_allclose(regret_matching([0, 0, 0, 0]), [0.25] * 4)
    np.testing.assert_allclose(regret_matching([5, 1, -1], legal=[False, True, True]), [0, 1, 0])


finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(st.lists(finite, min_size=1, max_size=8), st.floats(1e-3, 1e3))
def test_regret_matching_is_distribution_and_scale_invariant(values, c):
    p = regret_matching(values)
    assert np.all(p >= 0) and abs(p.sum() - 1) < 1e-9
    np.testing.assert_allclose(regret_matching(np.array(values) * c), p, atol=1e-12)


# -- reach and values --------------------------------------------------------

def test_reach_examples():
    tree = load_tree("kuhn")
    pol = tree.uniform_policy()
    reach = reach_probabilities(tree, pol)
    # first decision node: J dealt to player 0, Q to player 1
    node = tree.children[tree.children[0, 0], 1]
    assert tree.player[node] == 0
    assert reach.others(0)[node] == pytest.approx(1 / 6)
    assert np.all((reach.total >= 0) & (reach.total <= 1))
    np.testing.assert_allclose(reach.total, reach.own(0) * reach.others(0))
    assert reach.total[0] == 1.0


@pytest.mark.parametrize("game_id", ["kuhn", "leduc"])
def test_expected_values_match_terminal_enumeration(game_id):
    tree = load_tree(game_id)
    rng = np.random.default_rng(3)
    for pol in [tree.uniform_policy(), random_policy_array(tree, rng)]:
        value, per_node = expected_values(tree, pol)
        oracle = enumerate_values(game_id, PolicyTable.from_array(tree, pol))
        np.testing.assert_allclose(value, oracle, atol=1e-12)
        assert abs(value.sum()) < 1e-12
        # v(h) = sum_a pi(h, a) q(h, a)
        nodes = tree.decision_nodes
        kids = tree.children[nodes, : tree.num_actions]
        q = np.where(kids >= 0, per_node[np.maximum(kids, 0), 0], 0)
        np.testing.assert_allclose((pol[tree.infoset[nodes]] * q).sum(1), per_node[nodes, 0], atol=1e-12)


def test_kuhn_nash_value():
    tree = load_tree("kuhn")
    for alpha in (0.0, 0.2, 1 / 3):
        pol = kuhn_nash(alpha)
        np.testing.assert_allclose(expected_values(tree, pol)[0], KUHN_VALUE, atol=1e-12)
        assert abs(nash_conv(tree, pol)) < 1e-6


def test_kuhn_cfr_value_converges_to_nash_value():
    tree = load_tree("kuhn")
    solver = CFRSolver(tree).run(10_000)
    np.testing.assert_allclose(expected_values(tree, solver.average_policy())[0], KUHN_VALUE, atol=2e-3)


# -- counterfactual values ---------------------------------------------------

@pytest.mark.parametrize("seed", [None, 1, 2])
def test_counterfactual_value_relation(seed):
    tree = load_tree("kuhn")
    pol = tree.uniform_policy() if seed is None else random_policy_array(tree, np.random.default_rng(seed))
    reach = reach_probabilities(tree, pol)
    _, val = expected_values(tree, pol)
    for p in range(2):
        rep = counterfactual_values(tree, pol, p)
        rows = rep.infosets
        np.testing.assert_allclose(rep.v_c[rows], (pol[rows] * rep.q_c[rows]).sum(1), atol=1e-12)
        # standard state value from total reach, computed directly
        nodes = tree.player_nodes[p]
        sets = tree.infoset[nodes]
        num = np.bincount(sets, reach.total[nodes] * val[nodes, p], minlength=tree.num_infosets)
        den = np.bincount(sets, reach.total[nodes], minlength=tree.num_infosets)
        np.testing.assert_allclose(rep.values()[rows], num[rows] / den[rows], atol=1e-9)
        assert np.all(rep.beta[rows] >= 0)


def test_counterfactual_value_zero_when_unreachable():
    tree = load_tree("kuhn")
    pol = tree.uniform_policy().copy()
    for s in tree.infosets_of(1):
        if state_of_node(tree, tree.infoset_representative[s]).actions == (0,):
            pol[s] = [1.0, 0.0]  # player 1 never bets after a pass
    rep = counterfactual_values(tree, pol, 0)
    for s in tree.infosets_of(0):
        if state_of_node(tree, tree.infoset_representative[s]).actions == (0, 1):
            assert rep.beta[s] == 0 and rep.v_c[s] == 0


def test_root_counterfactual_values_sum_to_game_value():
    tree = load_tree("kuhn")
    pol = random_policy_array(tree, np.random.default_rng(5))
    rep = counterfactual_values(tree, pol, 0)
    first = [s for s in tree.infosets_of(0) if state_of_node(tree, tree.infoset_representative[s]).actions == ()]
    assert rep.v_c[first].sum() == pytest.approx(expected_values(tree, pol)[0][0], abs=1e-12)


# -- CFR ----------------------------------------------------------------------

def test_cfr_first_iteration_uniform():
    tree = load_tree("leduc")
    solver = CFRSolver(tree)
    np.testing.assert_array_equal(solver.step(), tree.uniform_policy())


def test_cfr_nash_conv_trend_kuhn():
    tree = load_tree("kuhn")
    solver = CFRSolver(tree)
    trace = []
    for _ in range(1000):
        solver.step()
        trace.append(nash_conv(tree, solver.average_policy()))
    trace = np.array(trace)
    assert np.all(trace >= -1e-9)
    medians = [np.median(w) for w in trace.reshape(10, 100)]
    assert all(b < a for a, b in zip(medians, medians[1:]))


# -- best response and NashConv -----------------------------------------------

def test_best_response_vs_uniform_matches_brute_force():
    tree = load_tree("kuhn")
    table = PolicyTable.from_array(tree, tree.uniform_policy())
    for p in range(2):
        value, br = best_response(tree, table, p)
        assert value == pytest.approx(brute_force_best_response("kuhn", table, p), abs=1e-12)
        assert value >= expected_values(tree, table)[0][p]
        for probs in br.entries.values():
            assert sorted(probs.tolist()) == [0.0, 1.0]


def test_best_response_vs_nash_is_game_value():
    tree = load_tree("kuhn")
    pol = kuhn_nash(0.1)
    for p in range(2):
        assert best_response(tree, pol, p)[0] == pytest.approx(KUHN_VALUE[p], abs=1e-6)


def test_best_response_tie_break_lowest_action():
    from armac.exact.values import best_response_array

    tree = GameTree("kuhn")
    tree.utilities[:] = 0.0  # every action ties
    _, arr = best_response_array(tree, tree.uniform_policy(), 0)
    assert np.all(arr[tree.infosets_of(0), 0] == 1.0)


def test_best_response_exploits_always_fold_leduc():
    tree = load_tree("leduc")
    pol = tree.uniform_policy().copy()
    for s in tree.infosets_of(1):
        row = np.zeros(3)
        row[0 if tree.legal[s, 0] else 1] = 1.0
        pol[s] = row
    value, _ = best_response(tree, pol, 0)
    assert value > expected_values(tree, pol)[0][0]
    assert value > 0.5


def test_nash_conv_uniform_kuhn_brute_force():
    tree = load_tree("kuhn")
    table = PolicyTable.from_array(tree, tree.uniform_policy())
    values = enumerate_values("kuhn", table)
    oracle = sum(brute_force_best_response("kuhn", table, p) - values[p] for p in range(2))
    assert nash_conv(tree, table) == pytest.approx(oracle, abs=1e-12)
    assert oracle == pytest.approx(11 / 12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31))
def test_nash_conv_non_negative(seed):
    tree = load_tree("leduc")
    pol = random_policy_array(tree, np.random.default_rng(seed), concentration=0.3)
    report = nash_conv_report(tree, pol)
    assert report.nash_conv >= -1e-9
    assert np.all(report.deviation_incentives >= -1e-9)


def test_enumeration_cap():
    with pytest.raises(TreeTooLarge):
        GameTree("leduc", max_nodes=1000)


# -- W and R oracles ------------------------------------------------------------

def test_w_single_snapshot_single_history():
    tree = load_tree("goofspiel5")
    pol = random_policy_array(tree, np.random.default_rng(0))
    W = exact_W_oracle(tree, [pol], 0)
    from armac.exact import advantages

    nodes, adv = advantages(tree, pol, 0)
    root = tree.infoset[0]
    assert nodes[0] == 0
    for a in range(5):
        assert W[(tree.infoset_keys[root], a)] == pytest.approx(adv[0, a], abs=1e-12)


def test_cumulative_regret_oracle_trivial_cases():
    tree = load_tree("kuhn")
    assert cumulative_regret_oracle("kuhn", [], 0) == {}
    pols = [PolicyTable.from_array(tree, random_policy_array(tree, np.random.default_rng(s))) for s in range(2)]
    once = cumulative_regret_oracle("kuhn", pols, 1)
    thrice = cumulative_regret_oracle("kuhn", pols * 3, 1)
    for key in once:
        np.testing.assert_allclose(thrice[key], 3 * once[key], atol=1e-12)


def _snapshot_sequence(tree, seed, length):
    rng = np.random.default_rng(seed)
    return [random_policy_array(tree, rng, concentration=0.5) for _ in range(length)]


def test_regret_oracle_matches_incremental_accumulation():
    tree = load_tree("kuhn")
    arrays = _snapshot_sequence(tree, 11, 5)
    incremental = sum(immediate_regrets(tree, a) for a in arrays)
    for p in range(2):
        oracle = cumulative_regret_oracle("kuhn", [PolicyTable.from_array(tree, a) for a in arrays], p)
        for s in tree.infosets_of(p):
            np.testing.assert_allclose(oracle[tree.infoset_keys[s]], incremental[s], atol=1e-12)


@pytest.mark.parametrize("game_id,length", [("kuhn", 6), ("leduc", 3)])
@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_normalized_relu_of_w_equals_regret(game_id, length, seed):
    tree = load_tree(game_id)
    arrays = _snapshot_sequence(tree, seed, length)
    tables = [PolicyTable.from_array(tree, a) for a in arrays]
    for p in range(2):
        W, w = exact_W_array(tree, arrays, p)
        R = cumulative_regret_oracle(game_id, tables, p)
        for s in tree.infosets_of(p):
            if w[s] <= 0:
                continue
            r = R[tree.infoset_keys[s]]
            np.testing.assert_allclose(r, w[s] * W[s], atol=1e-10)
            diff = regret_matching(W[s], tree.legal[s]) - regret_matching(r, tree.legal[s])
            assert np.max(np.abs(diff)) < 1e-9


def test_w_is_mean_over_members_and_snapshots():
    """Direct check of the conditional-expectation form on Kuhn."""
    from armac.exact import advantages

    tree = load_tree("kuhn")
    arrays = _snapshot_sequence(tree, 4, 3)
    W = exact_W_oracle(tree, arrays, 1)
    num, den = {}, {}
    for a in arrays:
        nodes, adv = advantages(tree, a, 1)
        opp = reach_probabilities(tree, a).others(1)
        for n, row in zip(nodes, adv):
            s = tree.infoset[n]
            num[s] = num.get(s, 0) + opp[n] * row
            den[s] = den.get(s, 0) + opp[n]
    for s in num:
        for a in np.flatnonzero(tree.legal[s]):
            assert W[(tree.infoset_keys[s], a)] == pytest.approx(num[s][a] / den[s], abs=1e-12)


def test_regret_matching_rows_uniform_fallback_respects_mask():
    legal = np.array([[True, False, True], [True, True, True]])
    out = regret_matching_rows(np.array([[-1.0, 5.0, -2.0], [0.0, 3.0, 1.0]]), legal)
    np.testing.assert_allclose(out, [[0.5, 0, 0.5], [0, 0.75, 0.25]])


@pytest.mark.parametrize("game", ["kuhn", "leduc"])
def test_perfect_recall_holds(game):
    assert perfect_recall_violations(load_tree(game)) == 0


def test_perfect_recall_audit_flags_forgetful_tree():
    tree = copy.copy(load_tree("kuhn"))
    nodes = tree.player_nodes[0]
    depth = np.array([_depth(tree, n) for n in nodes])
    first, later = nodes[depth == depth.min()][0], nodes[depth == depth.max()][0]
    # pretend player 0 cannot tell its opening move from its reply to a bet
    merged = tree.infoset.copy()
    merged[merged == merged[later]] = merged[first]
    tree.infoset = merged
    assert perfect_recall_violations(tree) > 0


def _depth(tree, node):
    d = 0
    while tree.parent[node] >= 0:
        node, d = tree.parent[node], d + 1
    return d

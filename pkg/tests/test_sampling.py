import io
from collections import Counter

import numpy as np
import pytest
from helpers import random_policy_array

from armac.exact import PolicyTable, advantages, exact_q_table, load_tree, nash_conv
from armac.games import new_initial_state
from armac.sampling import (
    EpisodeRecord,
    RecordFormatError,
    TablePolicy,
    build_episode_record,
    epsilon_mix,
    mc_rcfr_run,
    mccfr_outcome_sampling_run,
    outcome_sampling_check,
    outcome_sampling_estimate,
    read_records,
    sample_episode,
    uniform_policy,
    write_records,
)


def exact_terminal_distribution(game_id, policy_table):
    out = Counter()

    def walk(state, prob):
        if state.is_terminal():
            out[state.history_key()] += prob
            return
        if state.is_chance():
            for a, p in state.chance_outcomes():
                walk(state.child(a), prob * p)
            return
        probs = policy_table(state.info_state_key(state.current_player()), state.legal_mask())
        for a in state.legal_actions():
            if probs[a] > 0:
                walk(state.child(a), prob * probs[a])

    walk(new_initial_state(game_id), 1.0)
    return out


def test_epsilon_mix_examples():
    np.testing.assert_array_equal(epsilon_mix([0.3, 0.7], 0.0), [0.3, 0.7])
    np.testing.assert_allclose(epsilon_mix([1.0, 0.0], 1.0), [0.5, 0.5])
    np.testing.assert_allclose(epsilon_mix([0.8, 0.2], 0.05), [0.785, 0.215])
    np.testing.assert_allclose(epsilon_mix([1.0, 0.0, 0.0], 0.3, [True, True, False]), [0.85, 0.15, 0.0])


def test_deterministic_behavior_only_chance_factors():
    def always_bet(key, legal):
        return np.array([0.0, 1.0])

    traj = sample_episode(always_bet, "kuhn", np.random.default_rng(0))
    assert [s.action for s in traj.steps] == [1, 1]
    assert traj.behavior_prob() == pytest.approx(1 / 6, abs=1e-15)
    assert traj.chance_prob == pytest.approx(1 / 6)


def test_uniform_terminal_distribution_matches_enumeration():
    exact = exact_terminal_distribution("kuhn", uniform_policy)
    n = 100_000
    rng = np.random.default_rng(3)
    counts = Counter(sample_episode(uniform_policy, "kuhn", rng).final_history_key for _ in range(n))
    assert set(counts) <= set(exact)
    for key, p in exact.items():
        se = np.sqrt(p * (1 - p) / n)
        assert abs(counts[key] / n - p) <= 3 * se


def test_probability_bookkeeping_matches_exact_reach():
    tree = load_tree("leduc")
    pol = random_policy_array(tree, np.random.default_rng(0))
    table = TablePolicy(PolicyTable.from_array(tree, pol))
    exact = exact_terminal_distribution("leduc", table)
    rng = np.random.default_rng(1)
    for _ in range(300):
        traj = sample_episode(table, "leduc", rng)
        assert 0 < min(s.prob for s in traj.steps) <= 1
        # final history keys are unique per terminal history in Leduc (cards and bets are visible at the end)
        assert traj.behavior_prob() == pytest.approx(exact[traj.final_history_key], rel=1e-12)


def test_seeded_replay_identical_bytes():
    a = sample_episode(uniform_policy, "leduc", np.random.default_rng(42)).to_bytes()
    b = sample_episode(uniform_policy, "leduc", np.random.default_rng(42)).to_bytes()
    assert a == b


def test_gridworld_truncation_flagged():
    def north(key, legal):
        return np.array([1.0, 0, 0, 0])

    traj = sample_episode(north, "gridworld", np.random.default_rng(0))
    assert traj.truncated and len(traj.steps) == 50 and traj.returns[0] == 0.0
    assert traj.final_info_key is not None


def test_estimate_zero_off_trajectory():
    traj = sample_episode(uniform_policy, "kuhn", np.random.default_rng(0))
    est = outcome_sampling_estimate(traj, uniform_policy, 0)
    on = {(s.info_key, s.action) for s in traj.steps if s.player == 0}
    assert set(est.entries) == on
    off = next(s for s in traj.steps if s.player == 0)
    assert est[(off.info_key, 1 - off.action)] == 0.0
    bad = traj.steps[0]._replace(prob=0.0)
    traj.steps[0] = bad
    with pytest.raises(ValueError):
        outcome_sampling_estimate(traj, uniform_policy, 0)


def test_outcome_sampling_unbiased_on_kuhn():
    tree = load_tree("kuhn")
    pol = random_policy_array(tree, np.random.default_rng(1))
    check = outcome_sampling_check("kuhn", pol, 100_000, np.random.default_rng(2))
    assert len(check.keys) > 0
    assert check.within(3.0).all(), check.z_scores().max()


def test_exploration_lowers_weight_range():
    tree = load_tree("kuhn")
    pol = random_policy_array(tree, np.random.default_rng(4), concentration=0.3)
    pol = 0.98 * pol + 0.02 * tree.legal / tree.legal.sum(axis=1, keepdims=True)
    wide = outcome_sampling_check("kuhn", pol, 20_000, np.random.default_rng(5), epsilon=0.25)
    uniform = outcome_sampling_check("kuhn", pol, 20_000, np.random.default_rng(5), epsilon=1.0)
    assert uniform.max_weight < wide.max_weight
    assert uniform.within(4.0).all() and wide.within(4.0).all()


def test_mccfr_first_iteration_uniform_and_progress():
    seen = []

    def evaluate(table):
        return 0.0

    tree = load_tree("kuhn")
    avg, _ = mccfr_outcome_sampling_run("kuhn", 1, 0.6, np.random.default_rng(0))
    for key, probs in avg.entries.items():
        seen.append(probs)
        legal = tree.legal[tree.infoset_index[key]]
        np.testing.assert_allclose(probs, legal / legal.sum())
    assert seen
    _, trace = mccfr_outcome_sampling_run(
        "kuhn", 20_000, 0.6, np.random.default_rng(0), eval_every=2000,
        evaluate=lambda t: nash_conv(tree, t.to_array(tree)),
    )
    assert trace[-1][1] < trace[0][1]
    with pytest.raises(ValueError):
        mccfr_outcome_sampling_run("kuhn", 1, 0.0, np.random.default_rng(0))


def test_mc_rcfr_tabular_and_regressor_modes():
    from armac.approx import RegressorSpec, make_regressor

    tree = load_tree("kuhn")

    def evaluate(t):
        return nash_conv(tree, t.to_array(tree))

    _, trace = mc_rcfr_run("kuhn", 10_000, 0.6, np.random.default_rng(0), eval_every=1000, evaluate=evaluate)
    assert trace[-1][1] < trace[0][1]
    net = make_regressor(RegressorSpec("feedforward", 11, 2, (16,), step_size=1e-3))
    avg, trace = mc_rcfr_run(
        "kuhn", 20, 0.6, np.random.default_rng(0), regressor=net, episodes_per_iteration=10,
        train_steps=10, eval_every=20, evaluate=evaluate,
    )
    assert np.isfinite(trace[-1][1]) and net.params.version == 200


class ExactSnapshot:
    """Snapshot stand-in whose critic is the exact q table of ``pol``."""

    def __init__(self, tree, pol):
        self.table = TablePolicy(PolicyTable.from_array(tree, pol))
        q = exact_q_table(tree, pol)
        self.q = {tree.history_keys[h]: q[h] for h in tree.decision_nodes}

    def policy(self, key, legal):
        return self.table(key, legal)

    def q_values(self, hkey):
        return self.q[hkey]


def test_record_advantages_match_exact():
    tree = load_tree("kuhn")
    pol = random_policy_array(tree, np.random.default_rng(7))
    snap = ExactSnapshot(tree, pol)
    node_of = {tree.history_keys[h]: h for h in tree.decision_nodes}
    exact = {}
    for p in range(2):
        nodes, adv = advantages(tree, pol, p)
        exact.update({(p, int(h)): a for h, a in zip(nodes, adv)})
    rng = np.random.default_rng(0)
    for k in range(200):
        learner = k % 2
        behavior = [uniform_policy if p == learner else snap.policy for p in range(2)]
        rec = build_episode_record(sample_episode(behavior, "kuhn", rng), learner, 0, snap)
        for s in rec.learner_steps():
            h = node_of[s.history_key]
            np.testing.assert_allclose(s.advantages, exact[(learner, h)][s.legal], atol=1e-12)
            q = snap.q_values(s.history_key)[learner][s.legal]
            assert abs(np.dot(s.policy, q) - s.value) < 1e-9
        for s in rec.steps:
            if s.player != learner:
                assert s.advantages is None
        assert rec.max_abs_advantage() <= 4.0


def test_record_requires_snapshot():
    traj = sample_episode(uniform_policy, "kuhn", np.random.default_rng(0))
    with pytest.raises(ValueError):
        build_episode_record(traj, 0, 3, None)


class ZeroSnapshot:
    def policy(self, key, legal):
        return legal / legal.sum()

    def q_values(self, hkey):
        return np.zeros((1, 4))


def test_gridworld_record_single_agent():
    traj = sample_episode(uniform_policy, "gridworld", np.random.default_rng(0))
    rec = build_episode_record(traj, 0, 0, ZeroSnapshot())
    assert len(rec.learner_steps()) == len(rec.steps) > 0
    assert all(len(s.advantages) == 4 for s in rec.steps)


def test_record_binary_round_trip():
    tree = load_tree("kuhn")
    snap = ExactSnapshot(tree, tree.uniform_policy())
    rng = np.random.default_rng(0)
    recs = [build_episode_record(sample_episode(uniform_policy, "kuhn", rng), k % 2, k, snap, candidate=k, primary=k % 3 == 0) for k in range(5)]
    grid = sample_episode(lambda k, l: np.array([1.0, 0, 0, 0]), "gridworld", rng)
    recs.append(build_episode_record(grid, 0, 9, ZeroSnapshot()))
    buf = io.BytesIO()
    write_records(buf, recs)
    back = read_records(io.BytesIO(buf.getvalue()))
    assert len(back) == len(recs)
    for a, b in zip(recs, back):
        assert isinstance(b, EpisodeRecord)
        assert (a.learner, a.snapshot_index, a.candidate, a.primary, a.truncated) == (b.learner, b.snapshot_index, b.candidate, b.primary, b.truncated)
        np.testing.assert_array_equal(a.returns, b.returns)
        assert a.final_info_key == b.final_info_key
        for x, y in zip(a.steps, b.steps):
            assert (x.history_key, x.info_key, x.action) == (y.history_key, y.info_key, y.action)
            np.testing.assert_array_equal(x.policy, y.policy)
            assert (x.advantages is None) == (y.advantages is None)
    raw = buf.getvalue()
    with pytest.raises(RecordFormatError):
        read_records(io.BytesIO(b"NOTMAGIC" + raw[8:]))
    with pytest.raises(RecordFormatError):
        read_records(io.BytesIO(raw[:-5]))


@pytest.mark.slow
def test_mccfr_kuhn_million_iterations():
    tree = load_tree("kuhn")
    avg, _ = mccfr_outcome_sampling_run("kuhn", 1_000_000, 0.6, np.random.default_rng(0))
    assert nash_conv(tree, avg.to_array(tree)) < 0.05


@pytest.mark.slow
def test_mccfr_leduc_exploration_variance():
    tree = load_tree("leduc")
    spread = {}
    for eps in (0.1, 0.6):
        finals = []
        for seed in range(5):
            avg, _ = mccfr_outcome_sampling_run("leduc", 20_000, eps, np.random.default_rng(seed))
            finals.append(nash_conv(tree, avg.to_array(tree)))
        spread[eps] = np.std(finals)
    print("NashConv std across seeds", spread)
    assert spread[0.6] < spread[0.1]

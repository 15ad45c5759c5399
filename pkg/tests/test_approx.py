import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from armac.approx import (
    FeedForward,
    Parameters,
    RegressorSpec,
    TabularMean,
    checkpoint,
    finite_difference_check,
    make_regressor,
)


def ff(inp=5, out=3, hidden=(4, 4), seed=0, step=5e-5, activation="crelu"):
    return FeedForward(RegressorSpec("feedforward", inp, out, hidden, step_size=step, activation=activation, seed=seed))


def test_tabular_defaults_and_mean():
    t = TabularMean(2)
    np.testing.assert_array_equal(t.predict(b"s"), [0.0, 0.0])
    t.train_regression_step([b"s"], np.array([[1.0, 0.0]]), np.array([[1, 0]]))
    t.train_regression_step([b"s"], np.array([[3.0, 9.0]]), np.array([[1, 0]]))
    np.testing.assert_array_equal(t.predict(b"s"), [2.0, 0.0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=40))
def test_tabular_is_the_l2_minimizer(values):
    t = TabularMean(1)
    for v in values:
        t.train_regression_step([b"k"], np.array([[v]]), np.ones((1, 1)))
    assert t.predict(b"k")[0] == pytest.approx(np.mean(values), rel=1e-12, abs=1e-9)


def test_tabular_constant_targets_exact():
    t = TabularMean(3)
    y = np.array([[0.1, -0.7, 0.3]])
    for _ in range(1000):
        t.train_regression_step([b"x"], y, np.ones((1, 3)))
    np.testing.assert_array_equal(t.predict(b"x"), y[0])


def test_tabular_classification():
    t = TabularMean(3)
    masks = np.array([[1, 1, 0]], dtype=bool)
    t.train_classification_step([b"s"], np.array([[1.0, 0, 0]]), masks)
    t.train_classification_step([b"s"], np.array([[0, 1.0, 0]]), masks)
    np.testing.assert_allclose(t.predict_distribution([b"s"], masks)[0], [0.5, 0.5, 0.0])
    np.testing.assert_allclose(t.predict_distribution([b"new"], masks)[0], [0.5, 0.5, 0.0])
    with pytest.raises(ValueError):
        t.train_classification_step([b"s"], np.array([[0.5, 0.2, 0.3]]), masks)
    with pytest.raises(ValueError):
        t.train_classification_step([b"s"], np.array([[0.5, 0.2, 0.2]]), np.ones((1, 3), bool))


def test_feedforward_zero_weights_zero_output():
    net = ff()
    net.params.assign(np.zeros(len(net.params)))
    np.testing.assert_array_equal(net.predict(np.ones(5)), np.zeros(3))
    # and a fresh head predicts zero because the output layer starts at zero
    np.testing.assert_array_equal(ff(seed=3).predict(np.ones(5)), np.zeros(3))
    with pytest.raises(ValueError):
        net.predict(np.ones(4))


def test_parameters_reject_non_finite():
    p = Parameters([("W", (2, 2))])
    with pytest.raises(FloatingPointError):
        p.assign(np.array([0, np.nan, 0, 0]))
    assert p.version == 0
    p.assign(np.ones(4))
    assert p.version == 1 and p.named()["W"].shape == (2, 2)


@pytest.mark.parametrize("kind", ["regression", "classification"])
@pytest.mark.parametrize("activation", ["crelu", "relu"])
def test_gradient_matches_finite_differences(kind, activation):
    rng = np.random.default_rng(11)
    worst = 0.0
    for trial in range(25):
        inp, out = rng.integers(2, 7), rng.integers(2, 5)
        hidden = tuple(rng.integers(2, 6, size=rng.integers(1, 3)))
        net = ff(inp, out, hidden, seed=trial, activation=activation)
        # give the output layer non-zero weights so every layer gets gradient
        net.params.assign(net.params.flat + rng.normal(0, 0.5, len(net.params)))
        x = rng.normal(size=(4, inp))
        masks = rng.random((4, out)) < 0.8
        masks[:, 0] = True
        if kind == "regression":
            y = rng.normal(size=(4, out))
        else:
            y = rng.random((4, out)) * masks
            y /= y.sum(axis=1, keepdims=True)
        worst = max(worst, finite_difference_check(net, kind, x, y, masks))
    assert worst < 1e-4


def test_regression_loss_decreases_on_fixed_batch():
    rng = np.random.default_rng(0)
    net = ff(6, 3, (64, 64), seed=1)
    x = rng.integers(0, 2, size=(64, 6)).astype(float)
    y = rng.normal(size=(64, 3))
    m = np.ones((64, 3))
    losses = [net.train_regression_step(x, y, m) for _ in range(100)]
    assert losses[-1] < losses[0]
    assert np.mean(np.diff(losses) <= 1e-12) > 0.95


def test_masked_loss_ignores_illegal_targets():
    net = ff(3, 2, (4,), seed=2)
    x = np.ones((1, 3))
    m = np.array([[1.0, 0.0]])
    a = net.loss_and_grad("regression", x, np.array([[1.0, 5.0]]), m)
    b = net.loss_and_grad("regression", x, np.array([[1.0, -100.0]]), m)
    assert a[0] == b[0]
    np.testing.assert_array_equal(a[1], b[1])


def test_classification_converges_to_one_hot():
    net = ff(4, 3, (64, 64), seed=0, step=1e-3)
    x = np.array([[1.0, 0.0, 1.0, 0.0]])
    y = np.array([[0.0, 1.0, 0.0]])
    m = np.ones((1, 3), bool)
    for _ in range(1000):
        net.train_classification_step(x, y, m)
    assert np.abs(net.predict_distribution(x, m)[0] - y[0]).max() < 1e-2


def test_masked_action_gets_zero_probability():
    net = ff(2, 3, (4,), seed=0)
    net.params.assign(net.params.flat + 1.0)
    probs = net.predict_distribution(np.ones((1, 2)), np.array([[True, False, True]]))
    assert probs[0, 1] == 0.0 and probs.sum() == pytest.approx(1.0)


def test_nan_loss_aborts():
    net = ff(2, 2, (3,))
    with pytest.raises(FloatingPointError):
        net.train_regression_step(np.ones((1, 2)), np.array([[np.nan, 0.0]]), np.ones((1, 2)))
    with pytest.raises(ValueError):
        net.train_regression_step(np.zeros((0, 2)), np.zeros((0, 2)), np.zeros((0, 2)))


def test_determinism_bitwise():
    rng = np.random.default_rng(5)
    batches = [(rng.normal(size=(8, 5)), rng.normal(size=(8, 3))) for _ in range(20)]
    nets = [ff(seed=9), ff(seed=9)]
    for net in nets:
        for x, y in batches:
            net.train_regression_step(x, y, np.ones((8, 3)))
    assert nets[0].params.flat.tobytes() == nets[1].params.flat.tobytes()


def test_checkpoint_round_trip(tmp_path):
    spec = RegressorSpec("feedforward", 5, 3, (4, 4), seed=4)
    net = make_regressor(spec)
    rng = np.random.default_rng(0)
    for _ in range(3):
        net.train_regression_step(rng.normal(size=(2, 5)), rng.normal(size=(2, 3)), np.ones((2, 3)))
    checkpoint.save(tmp_path / "ff.bin", net, spec)
    back, spec2 = checkpoint.load(tmp_path / "ff.bin")
    assert spec2 == spec and back.params.version == net.params.version
    assert back.params.flat.tobytes() == net.params.flat.tobytes()

    tspec = RegressorSpec("tabular_mean", 5, 2)
    tab = make_regressor(tspec)
    tab.train_regression_step([b"a", b"b"], np.array([[1.0, 2.0], [3.0, 4.0]]), np.ones((2, 2)))
    tab2, _ = checkpoint.loads(checkpoint.dumps(tab, tspec))
    np.testing.assert_array_equal(tab2.predict(b"b"), [3.0, 4.0])

    blob = checkpoint.dumps(net, spec)
    with pytest.raises(checkpoint.CheckpointError):
        checkpoint.loads(b"XXXXXXXX" + blob[8:])
    with pytest.raises(checkpoint.CheckpointError):
        checkpoint.loads(blob[:-3])

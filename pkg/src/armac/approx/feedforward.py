"""Small fully connected networks with hand-written backprop and Adam.

Layout: ``input -> [affine -> crelu] * len(hidden) -> affine``. CReLU maps a
pre-activation ``z`` to ``[relu(z), relu(-z)]`` so the next layer sees twice
the width. The output layer starts at zero, so a fresh head predicts exactly
0 (which the policy code reads as "fall back to uniform") while the hidden
layers are randomly initialized and still receive gradient.
"""

from __future__ import annotations

import numpy as np

from .spec import RegressorSpec


class Parameters:
    """Flat float64 vector with named per-layer views and a step counter."""

    def __init__(self, shapes: list[tuple[str, tuple[int, ...]]], flat: np.ndarray | None = None):
        self.shapes = list(shapes)
        sizes = [int(np.prod(s)) for _, s in self.shapes]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
        n = int(self.offsets[-1])
        if flat is None:
            flat = np.zeros(n)
        flat = np.ascontiguousarray(flat, dtype=np.float64)
        if flat.shape != (n,):
            raise ValueError(f"expected {n} parameters, got {flat.shape}")
        self._check(flat)
        self.flat = flat
        self.version = 0

    @staticmethod
    def _check(values):
        if not np.isfinite(values).all():
            raise FloatingPointError("refusing to store non-finite parameters")

    def __len__(self) -> int:
        return len(self.flat)

    def view(self, i: int) -> np.ndarray:
        a, b = self.offsets[i], self.offsets[i + 1]
        return self.flat[a:b].reshape(self.shapes[i][1])

    def named(self) -> dict[str, np.ndarray]:
        return {name: self.view(i) for i, (name, _) in enumerate(self.shapes)}

    def assign(self, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=np.float64)
        self._check(values)
        self.flat[:] = values
        self.version += 1

    def copy(self) -> "Parameters":
        other = Parameters(self.shapes, self.flat.copy())
        other.version = self.version
        return other


class Adam:
    def __init__(self, size: int, step_size: float, beta1: float, beta2: float, eps: float):
        self.step_size, self.beta1, self.beta2, self.eps = step_size, beta1, beta2, eps
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def direction(self, grad: np.ndarray) -> np.ndarray:
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad * grad
        m_hat = self.m / (1 - self.beta1**self.t)
        v_hat = self.v / (1 - self.beta2**self.t)
        return -self.step_size * m_hat / (np.sqrt(v_hat) + self.eps)

    def state(self) -> np.ndarray:
        return np.concatenate([[self.t], self.m, self.v])

    def load_state(self, arr: np.ndarray) -> None:
        n = len(self.m)
        self.t = int(arr[0])
        self.m = arr[1 : n + 1].copy()
        self.v = arr[n + 1 :].copy()


class FeedForward:
    def __init__(self, spec: RegressorSpec):
        self.spec = spec
        shapes = []
        width = spec.input_width
        mult = 2 if spec.activation == "crelu" else 1
        for k, h in enumerate(spec.hidden):
            shapes += [(f"W{k}", (width, h)), (f"b{k}", (h,))]
            width = mult * h
        k = len(spec.hidden)
        shapes += [(f"W{k}", (width, spec.output_width)), (f"b{k}", (spec.output_width,))]
        self.params = Parameters(shapes)
        rng = np.random.default_rng(spec.seed)
        for i, (name, shape) in enumerate(shapes[:-2]):
            if name.startswith("W"):
                self.params.view(i)[...] = rng.normal(0.0, np.sqrt(2.0 / shape[0]), size=shape)
        self.optimizer = Adam(len(self.params), spec.step_size, spec.beta1, spec.beta2, spec.eps)

    @property
    def num_layers(self) -> int:
        return len(self.spec.hidden) + 1

    def _weights(self, params=None):
        params = params if params is not None else self.params
        return [(params.view(2 * k), params.view(2 * k + 1)) for k in range(self.num_layers)]

    def _as_input(self, features) -> np.ndarray:
        x = np.asarray(features, dtype=np.float64)
        if x.ndim == 1:
            x = x[None, :]
        if x.shape[1] != self.spec.input_width:
            raise ValueError(f"feature width {x.shape[1]} != {self.spec.input_width}")
        return x

    def forward(self, features, params=None):
        x = self._as_input(features)
        cache = []
        crelu = self.spec.activation == "crelu"
        layers = self._weights(params)
        for W, b in layers[:-1]:
            z = x @ W + b
            cache.append((x, z))
            x = np.concatenate([np.maximum(z, 0), np.maximum(-z, 0)], axis=1) if crelu else np.maximum(z, 0)
        W, b = layers[-1]
        cache.append((x, None))
        return x @ W + b, cache

    def predict(self, features) -> np.ndarray:
        out, _ = self.forward(features)
        return out[0] if np.ndim(features) == 1 else out

    def predict_one(self, x: np.ndarray) -> np.ndarray:
        """Single-row forward pass without the batch bookkeeping."""
        flat, off = self.params.flat, self.params.offsets
        crelu = self.spec.activation == "crelu"
        last = self.num_layers - 1
        for k in range(self.num_layers):
            shape = self.params.shapes[2 * k][1]
            W = flat[off[2 * k] : off[2 * k + 1]].reshape(shape)
            x = x @ W + flat[off[2 * k + 1] : off[2 * k + 2]]
            if k < last:
                x = np.concatenate((np.maximum(x, 0), np.maximum(-x, 0))) if crelu else np.maximum(x, 0)
        return x

    def predict_batch(self, features) -> np.ndarray:
        return self.forward(features)[0]

    def backward(self, dout: np.ndarray, cache, params=None) -> np.ndarray:
        layers = self._weights(params)
        grads = [None] * (2 * self.num_layers)
        crelu = self.spec.activation == "crelu"
        for k in range(self.num_layers - 1, -1, -1):
            x, _ = cache[k]
            W, _ = layers[k]
            grads[2 * k] = x.T @ dout
            grads[2 * k + 1] = dout.sum(axis=0)
            if k == 0:
                break
            dx = dout @ W.T
            z = cache[k - 1][1]
            if crelu:
                h = z.shape[1]
                dout = dx[:, :h] * (z > 0) - dx[:, h:] * (z < 0)
            else:
                dout = dx * (z > 0)
        return np.concatenate([g.ravel() for g in grads])

    # losses: value and gradient with respect to the outputs

    @staticmethod
    def regression_loss(out, targets, masks):
        diff = np.asarray(masks, dtype=np.float64) * (out - targets)
        n = len(out)
        return float(np.sum(diff * diff) / n), 2.0 * diff / n

    @staticmethod
    def classification_loss(out, targets, masks):
        masks = np.asarray(masks, dtype=bool)
        probs = masked_softmax(out, masks)
        n = len(out)
        logp = np.log(np.where(masks, probs, 1.0))
        loss = float(-np.sum(np.where(targets > 0, targets * logp, 0.0)) / n)
        return loss, (probs - targets) * masks / n

    def loss_and_grad(self, kind, features, targets, masks, params=None):
        out, cache = self.forward(features, params)
        targets = np.asarray(targets, dtype=np.float64)
        fn = self.regression_loss if kind == "regression" else self.classification_loss
        loss, dout = fn(out, targets, masks)
        return loss, self.backward(dout, cache, params)

    def _step(self, kind, features, targets, masks) -> float:
        if len(features) == 0:
            raise ValueError("empty batch")
        loss, grad = self.loss_and_grad(kind, features, targets, masks)
        if not np.isfinite(loss) or not np.isfinite(grad).all():
            raise FloatingPointError(f"non-finite {kind} loss {loss} at parameter version {self.params.version}")
        self.params.assign(self.params.flat + self.optimizer.direction(grad))
        return loss

    def train_regression_step(self, features, targets, masks) -> float:
        return self._step("regression", features, targets, masks)

    def train_classification_step(self, features, targets, masks) -> float:
        targets = np.asarray(targets, dtype=np.float64)
        masks = np.asarray(masks, dtype=bool)
        from .tabular import _check_distributions

        _check_distributions(targets, masks)
        return self._step("classification", features, targets, masks)

    def predict_distribution(self, features, masks) -> np.ndarray:
        return masked_softmax(self.predict_batch(features), np.asarray(masks, dtype=bool))

    def frozen(self) -> "FeedForward":
        """Parameter copy for inference only (no optimizer state)."""
        other = FeedForward.__new__(FeedForward)
        other.spec = self.spec
        other.params = self.params.copy()
        other.optimizer = None
        return other

    def copy(self) -> "FeedForward":
        other = FeedForward.__new__(FeedForward)
        other.spec = self.spec
        other.params = self.params.copy()
        other.optimizer = Adam(len(self.params), self.spec.step_size, self.spec.beta1, self.spec.beta2, self.spec.eps)
        other.optimizer.load_state(self.optimizer.state())
        return other


def masked_softmax(logits: np.ndarray, masks: np.ndarray) -> np.ndarray:
    z = np.where(masks, logits, -np.inf)
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def finite_difference_check(net: FeedForward, kind, features, targets, masks, h=1e-6) -> float:
    """Norm-wise relative error between analytic and central-difference gradients."""
    _, analytic = net.loss_and_grad(kind, features, targets, masks)
    base = net.params.flat.copy()
    numeric = np.empty_like(base)
    probe = net.params.copy()
    for i in range(len(base)):
        probe.flat[:] = base
        probe.flat[i] = base[i] + h
        up, _ = net.loss_and_grad(kind, features, targets, masks, probe)
        probe.flat[i] = base[i] - h
        down, _ = net.loss_and_grad(kind, features, targets, masks, probe)
        numeric[i] = (up - down) / (2 * h)
    denom = np.linalg.norm(analytic) + np.linalg.norm(numeric)
    return 0.0 if denom == 0 else float(np.linalg.norm(analytic - numeric) / denom)


def random_gradient_checks(configs: int = 100, seed: int = 0) -> np.ndarray:
    """Finite-difference errors over random nets, losses, activations and masks.

    Configurations cycle through both losses and both activations; the output
    layer is perturbed away from zero so every layer receives gradient.
    """
    rng = np.random.default_rng(seed)
    errors = np.empty(configs)
    for k in range(configs):
        kind = ("regression", "classification")[k % 2]
        activation = ("crelu", "relu")[(k // 2) % 2]
        inp, out = int(rng.integers(2, 7)), int(rng.integers(2, 5))
        hidden = tuple(int(h) for h in rng.integers(2, 6, size=rng.integers(1, 4)))
        net = FeedForward(RegressorSpec("feedforward", inp, out, hidden, activation=activation, seed=k))
        net.params.assign(net.params.flat + rng.normal(0, 0.5, len(net.params)))
        batch = int(rng.integers(1, 6))
        x = rng.normal(size=(batch, inp))
        masks = rng.random((batch, out)) < 0.8
        masks[:, 0] = True
        if kind == "regression":
            y = rng.normal(size=(batch, out))
        else:
            y = rng.random((batch, out)) * masks
            y /= y.sum(axis=1, keepdims=True)
        errors[k] = finite_difference_check(net, kind, x, y, masks)
    return errors

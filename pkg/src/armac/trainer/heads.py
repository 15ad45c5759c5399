"""Function-approximation heads keyed by observation bytes.

A head turns raw key bytes (information-state or history buffers) into model
inputs: the bytes themselves for lookup tables, 0/1 float vectors for
networks. Frozen heads memoize single-key predictions until cleared.
"""

from __future__ import annotations

import numpy as np

from armac.approx import FeedForward, RegressorSpec, TabularMean, make_regressor


def stack_features(keys, width: int) -> np.ndarray:
    return np.frombuffer(b"".join(keys), dtype=np.uint8).reshape(len(keys), width).astype(np.float64)


class Head:
    def __init__(self, spec: RegressorSpec, model=None):
        self.spec = spec
        self.model = model if model is not None else make_regressor(spec)
        self.tabular = isinstance(self.model, TabularMean)
        self._cache: dict = {}

    def inputs(self, keys):
        return list(keys) if self.tabular else stack_features(keys, self.spec.input_width)

    def predict(self, keys) -> np.ndarray:
        if len(keys) == 0:
            return np.zeros((0, self.spec.output_width))
        return self.model.predict_batch(self.inputs(keys))

    def predict_key(self, key: bytes) -> np.ndarray:
        out = self._cache.get(key)
        if out is None:
            if self.tabular:
                out = self.model.predict(key)
            else:
                out = self.model.predict_one(np.frombuffer(key, dtype=np.uint8).astype(np.float64))
            self._cache[key] = out
        return out

    def distribution(self, keys, masks) -> np.ndarray:
        """Classification output over legal actions."""
        if self.tabular:
            return self.model.predict_distribution(list(keys), masks)
        return self.model.predict_distribution(self.inputs(keys), masks)

    def train_regression(self, keys, targets, masks) -> float:
        self._cache.clear()
        return self.model.train_regression_step(self.inputs(keys), targets, masks)

    def train_classification(self, keys, targets, masks) -> float:
        self._cache.clear()
        return self.model.train_classification_step(self.inputs(keys), targets, masks)

    def frozen(self) -> "Head":
        return Head(self.spec, self.model.frozen())

    def clear_cache(self) -> None:
        self._cache.clear()

    @property
    def version(self) -> int:
        return self.model.params.version if isinstance(self.model, FeedForward) else self.model.version

"""Lookup-table approximators.

The regression table keeps, per key and action, an incremental weighted mean
of the targets and the total weight, so its prediction is the (weighted)
empirical l2 minimizer; constant targets are reproduced bit for bit. Unseen
entries predict 0.
"""

from __future__ import annotations

import numpy as np


def _key(features) -> bytes:
    if isinstance(features, (bytes, bytearray)):
        return bytes(features)
    return np.ascontiguousarray(features, dtype=np.float64).tobytes()


class TabularMean:
    def __init__(self, output_width: int):
        self.output_width = output_width
        self.index: dict[bytes, int] = {}
        self._means = np.zeros((16, output_width))
        self._weights = np.zeros((16, output_width))
        self.version = 0

    def __len__(self) -> int:
        return len(self.index)

    def rows(self, keys, create: bool = False) -> np.ndarray:
        out = np.empty(len(keys), dtype=np.int64)
        for i, k in enumerate(keys):
            k = _key(k)
            r = self.index.get(k)
            if r is None:
                if not create:
                    out[i] = -1
                    continue
                r = len(self.index)
                self.index[k] = r
                if r >= len(self._means):
                    self._grow()
            out[i] = r
        return out

    def _grow(self):
        n = 2 * len(self._means)
        for name in ("_means", "_weights"):
            old = getattr(self, name)
            new = np.zeros((n, self.output_width))
            new[: len(old)] = old
            setattr(self, name, new)

    def predict_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows)
        out = np.zeros((len(rows), self.output_width))
        ok = rows >= 0
        out[ok] = self._means[rows[ok]]
        return out

    def predict(self, features) -> np.ndarray:
        return self.predict_rows(self.rows([features]))[0]

    def predict_batch(self, keys) -> np.ndarray:
        return self.predict_rows(self.rows(keys))

    def add_rows(self, rows, targets, masks, weights=None) -> None:
        targets = np.asarray(targets, dtype=np.float64)
        masks = np.asarray(masks, dtype=np.float64)
        if not np.isfinite(targets).all():
            raise FloatingPointError("non-finite regression target")
        w = masks if weights is None else masks * np.asarray(weights, dtype=np.float64)[:, None]
        rows = np.asarray(rows)
        if len(np.unique(rows)) == len(rows):
            total = self._weights[rows] + w
            step = np.divide(w, total, out=np.zeros_like(w), where=total > 0)
            self._means[rows] += step * (targets - self._means[rows])
            self._weights[rows] = total
            self.version += 1
            return
        # repeated rows in one batch fold in one at a time
        for r, wi, ti in zip(rows, w, targets):
            total = self._weights[r] + wi
            step = np.divide(wi, total, out=np.zeros_like(wi), where=total > 0)
            self._means[r] += step * (ti - self._means[r])
            self._weights[r] = total
        self.version += 1

    def train_regression_step(self, keys, targets, masks, weights=None) -> float:
        """Fold a batch into the running means; returns the pre-update masked loss."""
        if len(keys) == 0:
            raise ValueError("empty batch")
        rows = self.rows(keys, create=True)
        pred = self.predict_rows(rows)
        masks = np.asarray(masks, dtype=np.float64)
        loss = float(np.mean(np.sum(masks * (pred - targets) ** 2, axis=1)))
        self.add_rows(rows, targets, masks, weights)
        return loss

    def train_classification_step(self, keys, targets, masks) -> float:
        targets = np.asarray(targets, dtype=np.float64)
        masks = np.asarray(masks, dtype=bool)
        _check_distributions(targets, masks)
        rows = self.rows(keys, create=True)
        pred = self.predict_distribution_rows(rows, masks)
        loss = float(-np.mean(np.sum(np.where(targets > 0, targets * np.log(np.maximum(pred, 1e-300)), 0.0), axis=1)))
        self.add_rows(rows, targets, masks)
        return loss

    def predict_distribution_rows(self, rows, masks) -> np.ndarray:
        mean = np.where(masks, np.maximum(self.predict_rows(rows), 0.0), 0.0)
        total = mean.sum(axis=1, keepdims=True)
        uniform = masks / masks.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(total > 0, mean / np.where(total > 0, total, 1.0), uniform)

    def predict_distribution(self, keys, masks) -> np.ndarray:
        return self.predict_distribution_rows(self.rows(keys), np.asarray(masks, dtype=bool))

    def frozen(self) -> "TabularMean":
        return self.copy()

    def copy(self) -> "TabularMean":
        other = TabularMean(self.output_width)
        other.index = dict(self.index)
        other._means = self._means.copy()
        other._weights = self._weights.copy()
        other.version = self.version
        return other


def _check_distributions(targets, masks):
    if np.any(targets < -1e-12) or np.any(np.abs(targets.sum(axis=1) - 1.0) > 1e-6):
        raise ValueError("classification targets must be probability distributions")
    if np.any((targets > 1e-12) & ~masks):
        raise ValueError("classification target puts mass on a masked action")

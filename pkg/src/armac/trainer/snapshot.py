"""Frozen epoch parameters and the reservoir that keeps a bounded sample of them."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from armac.approx import checkpoint, masked_softmax
from armac.exact.policy import regret_matching

from .heads import Head

HEAD_NAMES = ("wbar", "critic", "avg", "regret")


@dataclass(eq=False)
class PolicySnapshot:
    """Heads of one epoch: ``wbar`` defines pi^t, ``critic`` evaluates pi^t.

    ``regret`` predicts the epoch's immediate advantages (used by the
    current-regret exploration candidates) and ``avg`` the average policy.
    Never mutated after it is stored; only the memo caches change.
    """

    epoch: int
    heads: dict
    num_players: int
    num_actions: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self._policy: dict = {}

    def _rm(self, name, key, legal):
        cache = self._policy.setdefault(name, {})
        p = cache.get(key)
        if p is None:
            p = regret_matching(self.heads[name].predict_key(key.data), legal)
            cache[key] = p
        return p

    def policy(self, key, legal) -> np.ndarray:
        """pi^t(s) = NormalizedReLU(Wbar(s))."""
        return self._rm("wbar", key, legal)

    def regret_policy(self, key, legal) -> np.ndarray:
        return self._rm("regret", key, legal)

    def avg_policy(self, key, legal) -> np.ndarray:
        cache = self._policy.setdefault("avg", {})
        p = cache.get(key)
        if p is None:
            head = self.heads["avg"]
            if head.tabular:
                p = head.distribution([key.data], legal[None, :])[0]
            else:
                p = masked_softmax(head.predict_key(key.data)[None, :], legal[None, :])[0]
            cache[key] = p
        return p

    def q_values(self, history_key: bytes) -> np.ndarray:
        return self.heads["critic"].predict_key(history_key).reshape(self.num_players, self.num_actions)

    def clear_cache(self) -> None:
        self._policy = {}
        for h in self.heads.values():
            h.clear_cache()


def derive_current_policy(wbar: Head, key, legal) -> np.ndarray:
    return regret_matching(wbar.predict_key(key.data), legal)


class PolicyReservoir:
    """Reservoir sample of snapshots (uniform retention, bounded memory)."""

    def __init__(self, capacity: int = 1024, rng: np.random.Generator | None = None):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.slots: list = []
        self.items_seen = 0
        self.rng = rng if rng is not None else np.random.default_rng(0)
        self.last_epoch = -1

    def __len__(self):
        return len(self.slots)

    def add(self, snapshot) -> int | None:
        epoch = getattr(snapshot, "epoch", self.items_seen)
        if epoch <= self.last_epoch:
            raise ValueError(f"snapshot epoch {epoch} is not after {self.last_epoch}")
        self.last_epoch = epoch
        self.items_seen += 1
        if len(self.slots) < self.capacity:
            self.slots.append(snapshot)
            return len(self.slots) - 1
        j = int(self.rng.integers(self.items_seen))
        if j < self.capacity:
            self.slots[j] = snapshot
            return j
        return None

    def sample(self, rng: np.random.Generator):
        if not self.slots:
            raise LookupError("reservoir is empty")
        return self.slots[int(rng.integers(len(self.slots)))]

    # -- persistence -----------------------------------------------------
    def save(self, directory) -> None:
        os.makedirs(directory, exist_ok=True)
        entries = []
        for k, snap in enumerate(self.slots):
            files = {}
            for name in HEAD_NAMES:
                fname = f"slot{k:04d}_{name}.bin"
                head = snap.heads[name]
                checkpoint.save(os.path.join(directory, fname), head.model, head.spec)
                files[name] = fname
            entries.append({"epoch": snap.epoch, "files": files, "metadata": snap.metadata})
        manifest = {
            "format": "armac-reservoir",
            "version": 1,
            "capacity": self.capacity,
            "items_seen": self.items_seen,
            "last_epoch": self.last_epoch,
            "num_players": self.slots[0].num_players if self.slots else None,
            "num_actions": self.slots[0].num_actions if self.slots else None,
            "rng_state": self.rng.bit_generator.state,
            "slots": entries,
        }
        with open(os.path.join(directory, "index.json"), "w") as fh:
            json.dump(manifest, fh, indent=1, sort_keys=True)

    @classmethod
    def load(cls, directory) -> "PolicyReservoir":
        with open(os.path.join(directory, "index.json")) as fh:
            manifest = json.load(fh)
        if manifest.get("format") != "armac-reservoir" or manifest.get("version") != 1:
            raise ValueError("not a version-1 reservoir directory")
        rng = np.random.default_rng()
        rng.bit_generator.state = manifest["rng_state"]
        res = cls(manifest["capacity"], rng)
        res.items_seen = manifest["items_seen"]
        res.last_epoch = manifest["last_epoch"]
        for entry in manifest["slots"]:
            heads = {}
            for name, fname in entry["files"].items():
                model, spec = checkpoint.load(os.path.join(directory, fname))
                heads[name] = Head(spec, model)
            res.slots.append(
                PolicySnapshot(entry["epoch"], heads, manifest["num_players"], manifest["num_actions"], entry["metadata"])
            )
        return res

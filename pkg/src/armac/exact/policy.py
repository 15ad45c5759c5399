from __future__ import annotations

import json
from typing import Callable, Iterable

import numpy as np

from armac.games import InfoStateKey


def regret_matching(values, legal=None) -> np.ndarray:
    """Normalized positive part of ``values`` over the legal actions.

    Falls back to uniform over the legal actions when no entry is positive.
    Illegal entries always get probability 0.
    """
    values = np.asarray(values, dtype=np.float64)
    legal = np.ones(values.shape, dtype=bool) if legal is None else np.asarray(legal, dtype=bool)
    pos = np.maximum(values, 0.0) * legal
    total = pos.sum()
    if total > 0.0:
        return pos / total
    return legal / legal.sum()


def regret_matching_rows(values: np.ndarray, legal: np.ndarray) -> np.ndarray:
    """Row-wise :func:`regret_matching` for a ``(rows, actions)`` array."""
    pos = np.where(legal, np.maximum(values, 0.0), 0.0)
    total = pos.sum(axis=1, keepdims=True)
    uniform = legal / legal.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(total > 0.0, pos / np.where(total > 0.0, total, 1.0), uniform)
    return out


def epsilon_mix(dist, epsilon: float, legal=None) -> np.ndarray:
    """``(1 - epsilon) * dist + epsilon * uniform(legal)``."""
    dist = np.asarray(dist, dtype=np.float64)
    legal = np.ones(dist.shape, dtype=bool) if legal is None else np.asarray(legal, dtype=bool)
    if epsilon == 0.0:
        return dist.copy()
    return (1.0 - epsilon) * dist + epsilon * legal / legal.sum()


class PolicyTable:
    """Mapping from information-state key to a distribution over all action ids.

    Vectors are full width (``max_actions``) with zeros at illegal actions.
    """

    def __init__(self, num_actions: int, entries: dict[InfoStateKey, np.ndarray] | None = None):
        self.num_actions = num_actions
        self.entries: dict[InfoStateKey, np.ndarray] = dict(entries or {})

    def __getitem__(self, key: InfoStateKey) -> np.ndarray:
        return self.entries[key]

    def __setitem__(self, key: InfoStateKey, probs) -> None:
        self.entries[key] = np.asarray(probs, dtype=np.float64)

    def __contains__(self, key) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def get(self, key, default=None):
        return self.entries.get(key, default)

    def validate(self, legal: Callable[[InfoStateKey], np.ndarray] | None = None, atol: float = 1e-9) -> None:
        for key, p in self.entries.items():
            if p.shape != (self.num_actions,) or np.any(p < 0) or not np.isfinite(p).all():
                raise ValueError(f"invalid distribution at {key}: {p}")
            if abs(p.sum() - 1.0) > atol:
                raise ValueError(f"distribution at {key} sums to {p.sum()}")
            if legal is not None and np.any(p[~legal(key)] > 0):
                raise ValueError(f"probability on an illegal action at {key}")

    # -- tree conversion ---------------------------------------------------
    @classmethod
    def from_array(cls, tree, policy: np.ndarray, players: Iterable[int] | None = None) -> "PolicyTable":
        players = range(tree.num_players) if players is None else players
        table = cls(tree.num_actions)
        for s in np.flatnonzero(np.isin(tree.infoset_player, list(players))):
            table.entries[tree.infoset_keys[s]] = policy[s].copy()
        return table

    def to_array(self, tree) -> np.ndarray:
        """Dense ``(num_infosets, max_actions)`` array; missing keys become uniform."""
        out = tree.uniform_policy().copy()
        for key, p in self.entries.items():
            s = tree.infoset_index.get(key)
            if s is not None:
                out[s] = p
        return out

    # -- serialization -----------------------------------------------------
    def to_json(self, game_id: str) -> str:
        doc = {
            "format": "armac-policy",
            "version": 1,
            "game": game_id,
            "num_actions": self.num_actions,
            "entries": [
                {"player": k.player, "key": k.data.hex(), "probs": [float(x) for x in p]}
                for k, p in self.entries.items()
            ],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> tuple[str, "PolicyTable"]:
        doc = json.loads(text)
        if doc.get("format") != "armac-policy" or doc.get("version") != 1:
            raise ValueError("not an armac-policy v1 document")
        table = cls(int(doc["num_actions"]))
        for e in doc["entries"]:
            table[InfoStateKey(int(e["player"]), bytes.fromhex(e["key"]))] = e["probs"]
        table.validate()
        return doc["game"], table


def as_policy_array(tree, policy) -> np.ndarray:
    if isinstance(policy, PolicyTable):
        return policy.to_array(tree)
    policy = np.asarray(policy, dtype=np.float64)
    if policy.shape != (tree.num_infosets, tree.num_actions):
        raise ValueError(f"policy array has shape {policy.shape}")
    return policy

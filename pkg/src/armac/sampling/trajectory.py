"""Episode simulation against a black-box game.

A *policy source* is any callable ``(InfoStateKey, legal_mask) -> probs`` that
returns a full-width distribution with zeros on illegal actions.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from armac.exact.policy import PolicyTable, epsilon_mix
from armac.games import GameState, InfoStateKey, new_initial_state

PolicySource = Callable[[InfoStateKey, np.ndarray], np.ndarray]


def uniform_policy(key: InfoStateKey, legal: np.ndarray) -> np.ndarray:
    return legal / legal.sum()


class TablePolicy:
    """Policy source backed by a :class:`PolicyTable`; unknown keys play uniformly."""

    def __init__(self, table: PolicyTable):
        self.table = table

    def __call__(self, key, legal):
        p = self.table.get(key)
        return uniform_policy(key, legal) if p is None else p


class EpsilonPolicy:
    def __init__(self, base: PolicySource, epsilon: float):
        self.base, self.epsilon = base, epsilon

    def __call__(self, key, legal):
        return epsilon_mix(self.base(key, legal), self.epsilon, legal)


class Step(NamedTuple):
    history_key: bytes
    info_key: InfoStateKey
    player: int
    action: int
    prob: float
    dist: np.ndarray
    legal: np.ndarray


@dataclass
class Trajectory:
    steps: list[Step]
    returns: np.ndarray
    seed_id: object = None
    chance_prob: float = 1.0
    truncated: bool = False
    final_history_key: bytes = b""
    final_info_key: InfoStateKey | None = None
    final_legal: np.ndarray | None = field(default=None, repr=False)

    def behavior_prob(self) -> float:
        """eta^behavior(z): product of step probabilities and chance factors."""
        p = self.chance_prob
        for s in self.steps:
            p *= s.prob
        return p

    def player_prob(self, player: int) -> float:
        p = 1.0
        for s in self.steps:
            if s.player == player:
                p *= s.prob
        return p

    def to_bytes(self) -> bytes:
        out = [struct.pack("<?d", self.truncated, self.chance_prob), self.returns.astype("<f8").tobytes()]
        for s in self.steps:
            out.append(struct.pack("<bBd", s.player, s.action, s.prob))
            out.append(s.history_key)
            out.append(s.dist.astype("<f8").tobytes())
        return b"".join(out)


def sample_action(dist: np.ndarray, rng: np.random.Generator) -> int:
    cs = np.cumsum(dist)
    return int(np.searchsorted(cs, rng.random() * cs[-1], side="right"))


def _as_joint(behavior, num_players) -> Sequence[PolicySource]:
    if callable(behavior):
        return [behavior] * num_players
    if isinstance(behavior, PolicyTable):
        return [TablePolicy(behavior)] * num_players
    behavior = list(behavior)
    if len(behavior) != num_players:
        raise ValueError(f"need one policy source per player, got {len(behavior)}")
    return [TablePolicy(b) if isinstance(b, PolicyTable) else b for b in behavior]


def sample_episode(behavior, game, rng: np.random.Generator, seed_id=None) -> Trajectory:
    """Play one episode; ``behavior`` is a policy source or one per player."""
    state: GameState = new_initial_state(game) if isinstance(game, str) else game.clone()
    joint = _as_joint(behavior, state.descriptor.num_players)
    steps: list[Step] = []
    chance_prob = 1.0
    limit = state.descriptor.max_episode_length
    while not state.is_terminal():
        if state.is_chance():
            a = state.sample_chance(rng)
            chance_prob *= dict(state.chance_outcomes())[a]
            state.apply_action(a)
            continue
        if len(steps) >= limit:
            raise RuntimeError(f"episode exceeded {limit} decisions")
        p = state.current_player()
        key = state.info_state_key(p)
        legal = state.legal_mask()
        dist = np.asarray(joint[p](key, legal), dtype=np.float64)
        a = sample_action(dist, rng)
        if not legal[a] or dist[a] <= 0.0:
            raise ValueError(f"behavior picked action {a} with probability {dist[a]} at {key}")
        steps.append(Step(state.history_key(), key, p, a, float(dist[a]), dist, legal))
        state.apply_action(a)
    truncated = bool(getattr(state, "truncated", False))
    final_key = final_legal = None
    if truncated:
        # cut off by the step cap: keep what a critic needs to bootstrap
        final_key = state.info_state_key(steps[-1].player)
        final_legal = np.ones(state.descriptor.max_actions, dtype=bool)
    return Trajectory(
        steps=steps,
        returns=np.asarray(state.returns(), dtype=np.float64),
        seed_id=seed_id,
        chance_prob=chance_prob,
        truncated=truncated,
        final_history_key=state.history_key(),
        final_info_key=final_key,
        final_legal=final_legal,
    )

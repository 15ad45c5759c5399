"""Extensive-form game abstraction shared by every environment.

A state keeps one observation buffer per player: a fixed-width array of 0/1
bytes that grows monotonically with the player's action-observation sequence.
Information-state keys are the raw bytes of that buffer, so two histories
share a key exactly when the player has seen the same things.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

CHANCE = -1
TERMINAL = -2


class InfoStateKey(NamedTuple):
    player: int
    data: bytes


@dataclass(frozen=True)
class GameDescriptor:
    game_id: str
    num_players: int
    max_actions: int
    max_episode_length: int
    info_state_width: int
    enumerable: bool = True
    zero_sum: bool = True

    @property
    def history_width(self) -> int:
        return self.num_players * self.info_state_width

    @property
    def utility_span(self) -> float:
        """Upper bound on |u_i(z) - u_i(z')|, used to bound advantages."""
        return _UTILITY_SPAN[self.game_id]


_UTILITY_SPAN = {"kuhn": 4.0, "leduc": 26.0, "liars_dice": 2.0, "goofspiel5": 2.0, "gridworld": 2.0}


class GameError(ValueError):
    pass


class GameState:
    """Mutable position in an extensive-form game.

    Subclasses implement the rules through ``_apply``, ``_legal``,
    ``_chance_outcomes`` and ``_returns``; this class owns the history and the
    observation buffers.
    """

    descriptor: GameDescriptor

    def __init__(self, descriptor: GameDescriptor):
        self.descriptor = descriptor
        self.history: list[tuple[int, int]] = []
        self._obs = [bytearray(descriptor.info_state_width) for _ in range(descriptor.num_players)]
        for p in range(descriptor.num_players):
            if descriptor.num_players > 1:
                self._obs[p][p] = 1
        self._player = CHANCE

    # -- queries ---------------------------------------------------------
    def current_player(self) -> int:
        return self._player

    def is_terminal(self) -> bool:
        return self._player == TERMINAL

    def is_chance(self) -> bool:
        return self._player == CHANCE

    def legal_actions(self) -> list[int]:
        if self._player == TERMINAL:
            raise GameError("legal_actions called on a terminal state")
        if self._player == CHANCE:
            return [a for a, _ in self._chance_outcomes()]
        return self._legal()

    def legal_mask(self) -> np.ndarray:
        mask = np.zeros(self.descriptor.max_actions, dtype=bool)
        mask[self.legal_actions()] = True
        return mask

    def chance_outcomes(self) -> list[tuple[int, float]]:
        if self._player != CHANCE:
            raise GameError("chance_outcomes called on a non-chance state")
        return self._chance_outcomes()

    def returns(self) -> np.ndarray:
        if self._player != TERMINAL:
            raise GameError("returns called on a non-terminal state")
        return self._returns()

    def info_state_key(self, player: int) -> InfoStateKey:
        return InfoStateKey(player, bytes(self._obs[player]))

    def info_state_tensor(self, player: int) -> np.ndarray:
        return np.frombuffer(bytes(self._obs[player]), dtype=np.uint8).astype(np.float64)

    def history_key(self) -> bytes:
        return b"".join(bytes(o) for o in self._obs)

    def history_tensor(self) -> np.ndarray:
        return np.frombuffer(self.history_key(), dtype=np.uint8).astype(np.float64)

    # -- transitions -----------------------------------------------------
    def apply_action(self, action: int) -> None:
        if self._player == TERMINAL:
            raise GameError("cannot act in a terminal state")
        legal = self.legal_actions()
        if action not in legal:
            raise GameError(f"illegal action {action}; legal actions are {legal}")
        self.history.append((self._player, action))
        self._apply(action)

    def child(self, action: int) -> "GameState":
        state = self.clone()
        state.apply_action(action)
        return state

    def sample_chance(self, rng: np.random.Generator) -> int:
        """Simulator-side chance draw; learners never see the probabilities."""
        outcomes = self._chance_outcomes()
        u = rng.random()
        acc = 0.0
        for a, p in outcomes:
            acc += p
            if u < acc:
                return a
        return outcomes[-1][0]

    def clone(self) -> "GameState":
        other = object.__new__(type(self))
        other.__dict__.update(self.__dict__)
        other.history = list(self.history)
        other._obs = [bytearray(o) for o in self._obs]
        self._clone_into(other)
        return other

    def _clone_into(self, other: "GameState") -> None:
        """Deep-copy any mutable rule state (lists) onto ``other``."""

    def _set(self, players, index: int) -> None:
        for p in players:
            self._obs[p][index] = 1

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.history})"

    # -- rules -----------------------------------------------------------
    def _legal(self) -> list[int]:
        raise NotImplementedError

    def _apply(self, action: int) -> None:
        raise NotImplementedError

    def _chance_outcomes(self) -> list[tuple[int, float]]:
        raise GameError("this game has no chance nodes")

    def _returns(self) -> np.ndarray:
        raise NotImplementedError

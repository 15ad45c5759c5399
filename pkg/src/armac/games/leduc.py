"""Leduc poker.

Six cards (three ranks x two suits), ante 1, two betting rounds with fixed
raise sizes 2 and 4, at most two raises per round. Player 0 opens both rounds.
A private card pairing the public card wins the showdown, otherwise the
higher rank wins; equal ranks split.

Observation layout (38 bytes per player)::

    [0:2]    player one-hot
    [2:8]    own private card
    [8:14]   public card
    [14:26]  round 1: four action slots x (fold, call, raise)
    [26:38]  round 2: same
"""

from __future__ import annotations

import numpy as np

from armac.games.base import CHANCE, TERMINAL, GameDescriptor, GameState

FOLD, CALL, RAISE = 0, 1, 2
RAISE_SIZES = (2, 4)
MAX_RAISES = 2

DESCRIPTOR = GameDescriptor(
    game_id="leduc", num_players=2, max_actions=3, max_episode_length=8, info_state_width=38
)


def rank(card: int) -> int:
    return card // 2


class LeducState(GameState):
    def __init__(self):
        super().__init__(DESCRIPTOR)
        self.private: tuple[int, ...] = ()
        self.public: int | None = None
        self.round = 0
        self.round_actions: tuple[int, ...] = ()
        self.contrib = (1, 1)
        self.folded: int | None = None

    def _chance_outcomes(self):
        used = set(self.private)
        if self.public is not None:
            used.add(self.public)
        remaining = [c for c in range(6) if c not in used]
        return [(c, 1.0 / len(remaining)) for c in remaining]

    def _legal(self):
        actions = [FOLD] if self.contrib[0] != self.contrib[1] else []
        actions.append(CALL)
        if self.round_actions.count(RAISE) < MAX_RAISES:
            actions.append(RAISE)
        return actions

    def _apply(self, action):
        if self._player == CHANCE:
            if len(self.private) < 2:
                self._set([len(self.private)], 2 + action)
                self.private = self.private + (action,)
                self._player = 0 if len(self.private) == 2 else CHANCE
            else:
                self._set(range(2), 8 + action)
                self.public = action
                self._player = 0
            return
        p = self._player
        slot = 14 + 12 * self.round + 3 * len(self.round_actions) + action
        self._set(range(2), slot)
        self.round_actions = self.round_actions + (action,)
        contrib = list(self.contrib)
        if action == FOLD:
            self.folded = p
            self._player = TERMINAL
            return
        if action == RAISE:
            contrib[p] = contrib[1 - p] + RAISE_SIZES[self.round]
            self.contrib = tuple(contrib)
            self._player = 1 - p
            return
        contrib[p] = contrib[1 - p]
        self.contrib = tuple(contrib)
        if len(self.round_actions) == 1:
            self._player = 1 - p
        elif self.round == 0:
            self.round = 1
            self.round_actions = ()
            self._player = CHANCE
        else:
            self._player = TERMINAL

    def _returns(self):
        if self.folded is not None:
            loser = self.folded
        else:
            strength = [self._strength(c) for c in self.private]
            if strength[0] == strength[1]:
                return np.zeros(2)
            loser = 0 if strength[0] < strength[1] else 1
        out = np.zeros(2)
        out[loser] = -self.contrib[loser]
        out[1 - loser] = self.contrib[loser]
        return out

    def _strength(self, card: int) -> int:
        return 10 + rank(card) if rank(card) == rank(self.public) else rank(card)

"""Kuhn poker: three cards, one card each, a single betting round.

Observation layout (11 bytes per player)::

    [0:2]   player one-hot
    [2:5]   own card (J, Q, K)
    [5:11]  three action slots x (pass, bet)
"""

from __future__ import annotations

import numpy as np

from armac.games.base import CHANCE, TERMINAL, GameDescriptor, GameState

PASS, BET = 0, 1

DESCRIPTOR = GameDescriptor(
    game_id="kuhn", num_players=2, max_actions=2, max_episode_length=3, info_state_width=11
)


class KuhnState(GameState):
    def __init__(self):
        super().__init__(DESCRIPTOR)
        self.cards: tuple[int, ...] = ()
        self.actions: tuple[int, ...] = ()

    def _chance_outcomes(self):
        remaining = [c for c in range(3) if c not in self.cards]
        return [(c, 1.0 / len(remaining)) for c in remaining]

    def _legal(self):
        return [PASS, BET]

    def _apply(self, action):
        if self._player == CHANCE:
            self._set([len(self.cards)], 2 + action)
            self.cards = self.cards + (action,)
            self._player = 0 if len(self.cards) == 2 else CHANCE
            return
        self._set(range(2), 5 + 2 * len(self.actions) + action)
        self.actions = self.actions + (action,)
        if self.actions in ((PASS, PASS), (BET, PASS), (BET, BET), (PASS, BET, PASS), (PASS, BET, BET)):
            self._player = TERMINAL
        else:
            self._player = len(self.actions) % 2

    def _returns(self):
        a = self.actions
        winner = 0 if self.cards[0] > self.cards[1] else 1
        if a == (BET, PASS):
            winner, stake = 0, 1
        elif a == (PASS, BET, PASS):
            winner, stake = 1, 1
        else:
            stake = 2 if BET in a else 1
        out = np.full(2, -float(stake))
        out[winner] = stake
        return out

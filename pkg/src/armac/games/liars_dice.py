"""Liar's Dice, one six-sided die per player.

Bids are (count, face) with count in {1, 2} and face in {1..6}, ordered by
count then face and encoded as ``(count - 1) * 6 + (face - 1)``. Action 12 is
the challenge. Players alternate, player 0 first; each bid must be strictly
higher than the last. On a challenge the bid stands iff at least ``count`` of
the two dice show ``face``; the loser of the challenge pays 1. There are no
wild faces.

Observation layout (21 bytes per player)::

    [0:2]    player one-hot
    [2:8]    own die face
    [8:21]   actions taken so far (12 bids + challenge); bids are strictly
             increasing and turns alternate, so the set fixes the sequence
"""

from __future__ import annotations

import numpy as np

from armac.games.base import CHANCE, TERMINAL, GameDescriptor, GameState

NUM_BIDS = 12
CHALLENGE = 12

DESCRIPTOR = GameDescriptor(
    game_id="liars_dice", num_players=2, max_actions=13, max_episode_length=13, info_state_width=21
)


def bid_count(bid: int) -> int:
    return bid // 6 + 1


def bid_face(bid: int) -> int:
    return bid % 6 + 1


class LiarsDiceState(GameState):
    def __init__(self):
        super().__init__(DESCRIPTOR)
        self.dice: tuple[int, ...] = ()
        self.bids: tuple[int, ...] = ()
        self.challenger: int | None = None

    def _chance_outcomes(self):
        return [(f, 1.0 / 6.0) for f in range(6)]

    def _legal(self):
        if not self.bids:
            return list(range(NUM_BIDS))
        return list(range(self.bids[-1] + 1, NUM_BIDS)) + [CHALLENGE]

    def _apply(self, action):
        if self._player == CHANCE:
            self._set([len(self.dice)], 2 + action)
            self.dice = self.dice + (action + 1,)
            self._player = 0 if len(self.dice) == 2 else CHANCE
            return
        self._set(range(2), 8 + action)
        if action == CHALLENGE:
            self.challenger = self._player
            self._player = TERMINAL
            return
        self.bids = self.bids + (action,)
        self._player = 1 - self._player

    def _returns(self):
        bid = self.bids[-1]
        matches = sum(d == bid_face(bid) for d in self.dice)
        bidder = 1 - self.challenger
        loser = self.challenger if matches >= bid_count(bid) else bidder
        out = np.ones(2)
        out[loser] = -1.0
        return out

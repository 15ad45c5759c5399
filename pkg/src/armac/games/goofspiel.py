"""Imperfect-information Goofspiel with five cards and descending point order.

Each turn both players secretly bid one card from their hand (values 1..5,
action ids 0..4) for the point card on the table; point cards come out in the
fixed order 5, 4, 3, 2, 1. The simultaneous bids are serialized as two
consecutive moves, player 0 then player 1, and player 1 does not observe the
pending bid. Only the outcome of each turn (who won, or a tie) is public. A
tied turn discards the point card. The final utility is +1/-1 for the player
with more points, 0 on equal totals.

Observation layout (42 bytes per player)::

    [0:2]    player one-hot
    [2:27]   own bid per turn, five turns x five cards
    [27:42]  turn outcome per turn, five turns x (player 0 won, player 1 won, tie)
"""

from __future__ import annotations

import numpy as np

from armac.games.base import TERMINAL, GameDescriptor, GameState

NUM_CARDS = 5
POINT_ORDER = (5, 4, 3, 2, 1)

DESCRIPTOR = GameDescriptor(
    game_id="goofspiel5", num_players=2, max_actions=5, max_episode_length=10, info_state_width=42
)


class GoofspielState(GameState):
    def __init__(self):
        super().__init__(DESCRIPTOR)
        self._player = 0
        self.hands = (frozenset(range(NUM_CARDS)), frozenset(range(NUM_CARDS)))
        self.turn = 0
        self.pending: int | None = None
        self.points = (0, 0)

    def _legal(self):
        return sorted(self.hands[self._player])

    def _apply(self, action):
        p = self._player
        self._set([p], 2 + NUM_CARDS * self.turn + action)
        hands = list(self.hands)
        hands[p] = hands[p] - {action}
        self.hands = tuple(hands)
        if p == 0:
            self.pending = action
            self._player = 1
            return
        points = list(self.points)
        value = POINT_ORDER[self.turn]
        if self.pending > action:
            outcome = 0
            points[0] += value
        elif action > self.pending:
            outcome = 1
            points[1] += value
        else:
            outcome = 2
        self.points = tuple(points)
        self._set(range(2), 2 + NUM_CARDS * NUM_CARDS + 3 * self.turn + outcome)
        self.pending = None
        self.turn += 1
        self._player = TERMINAL if self.turn == NUM_CARDS else 0

    def _returns(self):
        diff = np.sign(self.points[0] - self.points[1])
        return np.array([diff, -diff], dtype=np.float64)

"""Single-agent exploration gridworld.

A 6x6 grid with the agent starting in the corner (0, 0). Stepping onto (2, 0)
ends the episode with reward +1; stepping onto (5, 5) ends it with +2. Moves
into a wall leave the agent in place. Episodes are cut after 50 moves with
return 0 and ``truncated`` set. Cells are (row, col); north decreases the row.

The observation is the one-hot agent cell (36 bytes), i.e. states are
aggregated by position rather than by full history.
"""

from __future__ import annotations

import numpy as np

from armac.games.base import TERMINAL, GameDescriptor, GameState

SIZE = 6
START = (0, 0)
REWARDS = {(2, 0): 1.0, (5, 5): 2.0}
STEP_LIMIT = 50
NORTH, SOUTH, EAST, WEST = 0, 1, 2, 3
_MOVES = {NORTH: (-1, 0), SOUTH: (1, 0), EAST: (0, 1), WEST: (0, -1)}

DESCRIPTOR = GameDescriptor(
    game_id="gridworld",
    num_players=1,
    max_actions=4,
    max_episode_length=STEP_LIMIT,
    info_state_width=SIZE * SIZE,
    enumerable=False,
    zero_sum=False,
)


class GridworldState(GameState):
    def __init__(self):
        super().__init__(DESCRIPTOR)
        self._player = 0
        self.pos = START
        self.steps = 0
        self.reward = 0.0
        self.truncated = False
        self._obs[0][self._cell(START)] = 1

    @staticmethod
    def _cell(pos):
        return pos[0] * SIZE + pos[1]

    def _legal(self):
        return [NORTH, SOUTH, EAST, WEST]

    def _apply(self, action):
        dr, dc = _MOVES[action]
        r = min(max(self.pos[0] + dr, 0), SIZE - 1)
        c = min(max(self.pos[1] + dc, 0), SIZE - 1)
        self._obs[0][self._cell(self.pos)] = 0
        self.pos = (r, c)
        self._obs[0][self._cell(self.pos)] = 1
        self.steps += 1
        if self.pos in REWARDS:
            self.reward = REWARDS[self.pos]
            self._player = TERMINAL
        elif self.steps >= STEP_LIMIT:
            self.truncated = True
            self._player = TERMINAL

    def _returns(self):
        return np.array([self.reward])

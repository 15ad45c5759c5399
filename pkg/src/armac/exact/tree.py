"""Flat, array-backed enumeration of a full game tree.

Nodes are numbered in depth-first pre-order, so every parent precedes its
children and, within one depth level, siblings are contiguous and ordered by
parent. That lets every bottom-up pass be a sequence of ``np.add.reduceat``
calls, one per level.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from armac.games import CHANCE, TERMINAL, GameError, InfoStateKey, get_descriptor, new_initial_state

MAX_NODES = 10_000_000


class TreeTooLarge(RuntimeError):
    pass


class GameTree:
    """Exhaustive enumeration of one game.

    Attributes (n = num_players, W = max_actions)::

        player[node]          acting player, CHANCE or TERMINAL
        parent[node]          parent index (-1 at the root)
        parent_action[node]   action taken at the parent to get here
        depth[node]
        chance_prob[node]     probability of the edge into node when the parent is chance
        utilities[node, n]    terminal returns (zero elsewhere)
        infoset[node]         information-state index of decision nodes, else -1
        children[node, B]     child per action id, -1 where absent
        legal[s, W]           legal-action mask of information state s
        infoset_player[s]
        infoset_keys[s]       InfoStateKey
        infoset_tensors[s]    observation bytes as a (num_infosets, width) uint8 array
        history_keys[node]    HistoryKey bytes for decision nodes, None elsewhere
    """

    def __init__(self, game_id: str, max_nodes: int = MAX_NODES):
        self.descriptor = get_descriptor(game_id)
        if not self.descriptor.enumerable:
            raise TreeTooLarge(f"{game_id} is not enumerable")
        self.game_id = game_id
        self.num_players = self.descriptor.num_players
        self.num_actions = self.descriptor.max_actions
        self._enumerate(max_nodes)
        self._index_levels()

    # ------------------------------------------------------------------
    def _enumerate(self, max_nodes: int) -> None:
        n = self.num_players
        player, parent, paction, depth, cprob = [], [], [], [], []
        utilities: dict[int, np.ndarray] = {}
        infoset: list[int] = []
        history_keys: list[bytes | None] = []
        child_edges: list[tuple[int, int, int]] = []
        infoset_index: dict[InfoStateKey, int] = {}
        infoset_keys: list[InfoStateKey] = []
        legal_rows: list[list[int]] = []
        infoset_depth: list[int] = []

        stack = [(new_initial_state(self.game_id), -1, -1, 1.0, 0)]
        while stack:
            state, par, act, prob, d = stack.pop()
            idx = len(player)
            if idx >= max_nodes:
                raise TreeTooLarge(f"{self.game_id}: more than {max_nodes} histories")
            cur = state.current_player()
            player.append(cur)
            parent.append(par)
            paction.append(act)
            depth.append(d)
            cprob.append(prob)
            if par >= 0:
                child_edges.append((par, act, idx))
            if cur == TERMINAL:
                utilities[idx] = state.returns()
                infoset.append(-1)
                history_keys.append(None)
                continue
            if cur == CHANCE:
                infoset.append(-1)
                history_keys.append(None)
                outcomes = state.chance_outcomes()
            else:
                key = state.info_state_key(cur)
                s = infoset_index.get(key)
                legal = state.legal_actions()
                if s is None:
                    s = len(infoset_keys)
                    infoset_index[key] = s
                    infoset_keys.append(key)
                    legal_rows.append(legal)
                    infoset_depth.append(d)
                elif legal_rows[s] != legal:
                    raise GameError(f"legal actions differ inside information state {key}")
                elif infoset_depth[s] != d:
                    raise GameError("information state members at different depths")
                infoset.append(s)
                history_keys.append(state.history_key())
                outcomes = [(a, 1.0) for a in legal]
            for a, p in reversed(outcomes):
                stack.append((state.child(a), idx, a, p, d + 1))

        num = len(player)
        self.num_nodes = num
        self.player = np.array(player, dtype=np.int64)
        self.parent = np.array(parent, dtype=np.int64)
        self.parent_action = np.array(paction, dtype=np.int64)
        self.depth = np.array(depth, dtype=np.int64)
        self.chance_prob = np.array(cprob, dtype=np.float64)
        self.infoset = np.array(infoset, dtype=np.int64)
        self.history_keys = history_keys
        self.utilities = np.zeros((num, n))
        for idx, u in utilities.items():
            self.utilities[idx] = u
        width = max(self.num_actions, 1 + max(a for _, a, _ in child_edges))
        self.children = np.full((num, width), -1, dtype=np.int64)
        edges = np.array(child_edges, dtype=np.int64)
        self.children[edges[:, 0], edges[:, 1]] = edges[:, 2]

        self.infoset_keys = infoset_keys
        self.infoset_index = infoset_index
        self.num_infosets = len(infoset_keys)
        self.infoset_player = np.array([k.player for k in infoset_keys], dtype=np.int64)
        self.legal = np.zeros((self.num_infosets, self.num_actions), dtype=bool)
        for s, row in enumerate(legal_rows):
            self.legal[s, row] = True
        self.infoset_tensors = np.array(
            [np.frombuffer(k.data, dtype=np.uint8) for k in infoset_keys], dtype=np.uint8
        ).reshape(self.num_infosets, self.descriptor.info_state_width)

    def _index_levels(self) -> None:
        self.max_depth = int(self.depth.max())
        self.levels = [np.flatnonzero(self.depth == d) for d in range(self.max_depth + 1)]
        # per level below the root: unique parents and segment starts for reduceat
        self.level_parents = [None]
        self.level_starts = [None]
        for d in range(1, self.max_depth + 1):
            par = self.parent[self.levels[d]]
            starts = np.flatnonzero(np.r_[True, par[1:] != par[:-1]])
            self.level_parents.append(par[starts])
            self.level_starts.append(starts)
        decision = self.infoset >= 0
        self.decision_nodes = np.flatnonzero(decision)
        nonroot = self.parent >= 0
        from_decision = nonroot & (self.player[np.maximum(self.parent, 0)] >= 0)
        self._pd_nodes = np.flatnonzero(from_decision)
        self._pd_rows = self.infoset[self.parent[self._pd_nodes]]
        self._pd_cols = self.parent_action[self._pd_nodes]
        base = np.ones(self.num_nodes)
        from_chance = nonroot & (self.player[np.maximum(self.parent, 0)] == CHANCE)
        base[from_chance] = self.chance_prob[from_chance]
        self._edge_base = base
        # actor row of the edge into each node: player id, or num_players for chance
        actor = np.where(self.player == CHANCE, self.num_players, self.player)
        self.edge_actor = np.where(nonroot, actor[np.maximum(self.parent, 0)], -1)

        self.player_nodes = []
        self.player_node_infosets = []
        self.player_level_nodes = []
        for p in range(self.num_players):
            nodes = np.flatnonzero(self.player == p)
            self.player_nodes.append(nodes)
            self.player_node_infosets.append(self.infoset[nodes])
            by_level = {}
            for d in np.unique(self.depth[nodes]):
                sel = nodes[self.depth[nodes] == d]
                by_level[int(d)] = sel
            self.player_level_nodes.append(by_level)
        # one member per information state (own reach is equal across members)
        rep = np.full(self.num_infosets, -1, dtype=np.int64)
        rep[self.infoset[self.decision_nodes[::-1]]] = self.decision_nodes[::-1]
        self.infoset_representative = rep
        self.terminal_nodes = np.flatnonzero(self.player == TERMINAL)

    # ------------------------------------------------------------------
    def uniform_policy(self) -> np.ndarray:
        return self.legal / self.legal.sum(axis=1, keepdims=True)

    def edge_probs(self, policy: np.ndarray) -> np.ndarray:
        """Probability of the edge entering each node under ``policy`` (root: 1)."""
        e = self._edge_base.copy()
        e[self._pd_nodes] = policy[self._pd_rows, self._pd_cols]
        return e

    def infosets_of(self, player: int) -> np.ndarray:
        return np.flatnonzero(self.infoset_player == player)

    def __repr__(self) -> str:
        return f"GameTree({self.game_id}, nodes={self.num_nodes}, infosets={self.num_infosets})"


@lru_cache(maxsize=None)
def load_tree(game_id: str) -> GameTree:
    """Compiled tree, cached per process."""
    return GameTree(game_id)


def perfect_recall_violations(tree: GameTree) -> int:
    """Number of decision nodes whose own history disagrees with their state's.

    Within an information state every history must share the acting player's
    last own decision (state and action taken). By induction over depth this
    makes the whole own action-observation sequence identical.
    """
    bad = 0
    for p in range(tree.num_players):
        last_s = np.full(tree.num_nodes, -1, dtype=np.int64)
        last_a = np.full(tree.num_nodes, -1, dtype=np.int64)
        for nodes in tree.levels[1:]:
            par = tree.parent[nodes]
            mine = tree.player[par] == p
            last_s[nodes] = np.where(mine, tree.infoset[par], last_s[par])
            last_a[nodes] = np.where(mine, tree.parent_action[nodes], last_a[par])
        nodes = tree.player_nodes[p]
        rep = tree.infoset_representative[tree.infoset[nodes]]
        bad += int(np.sum((last_s[nodes] != last_s[rep]) | (last_a[nodes] != last_a[rep])))
    return bad

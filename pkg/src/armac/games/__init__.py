"""Game registry and the functional game API."""

from __future__ import annotations

from armac.games import goofspiel, gridworld, kuhn, leduc, liars_dice
from armac.games.base import (
    CHANCE,
    TERMINAL,
    GameDescriptor,
    GameError,
    GameState,
    InfoStateKey,
)

_REGISTRY = {
    "kuhn": (kuhn.DESCRIPTOR, kuhn.KuhnState),
    "leduc": (leduc.DESCRIPTOR, leduc.LeducState),
    "liars_dice": (liars_dice.DESCRIPTOR, liars_dice.LiarsDiceState),
    "goofspiel5": (goofspiel.DESCRIPTOR, goofspiel.GoofspielState),
    "gridworld": (gridworld.DESCRIPTOR, gridworld.GridworldState),
}

GAME_IDS = tuple(_REGISTRY)


def get_descriptor(game_id: str) -> GameDescriptor:
    try:
        return _REGISTRY[game_id][0]
    except KeyError:
        raise GameError(f"unknown game {game_id!r}; known games: {', '.join(GAME_IDS)}") from None


def new_initial_state(descriptor: GameDescriptor | str) -> GameState:
    game_id = descriptor if isinstance(descriptor, str) else descriptor.game_id
    get_descriptor(game_id)
    return _REGISTRY[game_id][1]()


def legal_actions(state: GameState) -> list[int]:
    return state.legal_actions()


def apply_action(state: GameState, action: int) -> GameState:
    """Return the child history; ``state`` is left untouched."""
    return state.child(action)


def chance_outcomes(state: GameState) -> list[tuple[int, float]]:
    return state.chance_outcomes()


def info_state_key(state: GameState, player: int) -> InfoStateKey:
    return state.info_state_key(player)


def returns(state: GameState):
    return state.returns()


__all__ = [
    "CHANCE",
    "TERMINAL",
    "GAME_IDS",
    "GameDescriptor",
    "GameError",
    "GameState",
    "InfoStateKey",
    "apply_action",
    "chance_outcomes",
    "get_descriptor",
    "info_state_key",
    "legal_actions",
    "new_initial_state",
    "returns",
]

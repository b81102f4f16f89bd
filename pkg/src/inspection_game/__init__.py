"""Exact solver and verifier for the sequential inspection game."""

from .model import (
    BehaviorStrategy,
    GameSpec,
    GameSpecError,
    StageGame,
    StateKey,
    StateSolution,
    Variant,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "BehaviorStrategy",
    "GameSpec",
    "GameSpecError",
    "StageGame",
    "StateKey",
    "StateSolution",
    "Variant",
    "validate",
]

"""Deterministic 2D search-and-rescue world for knowledge-transfer trials."""
from .actions import avoidance_direction, collision_resultant, default_registry, sense
from .trial import CSV_COLUMNS, Mode, SimConfig, TrialResult, build_world, run_trial, run_world
from .world import (
    CARRIED,
    COLLECTED,
    COLORS,
    GROUND,
    Arena,
    ConfigurationError,
    Robot,
    Target,
    World,
    color_sequence,
    target_flag,
)

__all__ = [
    "Arena", "CARRIED", "COLLECTED", "COLORS", "CSV_COLUMNS", "ConfigurationError", "GROUND",
    "Mode", "Robot", "SimConfig", "Target", "TrialResult", "World", "avoidance_direction",
    "build_world", "collision_resultant", "color_sequence", "default_registry", "run_trial",
    "run_world", "sense", "target_flag",
]

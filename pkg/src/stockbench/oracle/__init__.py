"""Human-prediction platform: event-sourced state, leaderboards, augmentation."""

from .core import (
    AugmentedForecast,
    ConflictError,
    LeaderboardEntry,
    OracleService,
    PredictionRecord,
    SuperforecasterStatus,
    UnknownUserError,
    User,
    ValidationError,
    detect_superforecasters,
)
from .store import CorruptLogError, EventStore

__all__ = [
    "AugmentedForecast",
    "ConflictError",
    "LeaderboardEntry",
    "OracleService",
    "PredictionRecord",
    "SuperforecasterStatus",
    "UnknownUserError",
    "User",
    "ValidationError",
    "detect_superforecasters",
    "CorruptLogError",
    "EventStore",
]

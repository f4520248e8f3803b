"""Domain logic for the prediction platform.

Users submit price predictions for future dates; an admin resolves each
(symbol, date) against the realized price; resolved predictions feed a
percentage-error leaderboard with competition ranking; persistent top
performers get flagged as superforecasters and their open consensus blends
with the model forecast.

All state changes flow through events so a restart replays to an identical
state.  Scoring uses percentage error, which keeps rankings invariant under
uniform price scaling across symbols.
"""

from __future__ import annotations

import functools
import math
import secrets
import threading
import uuid
from dataclasses import dataclass, replace
from datetime import date as CalendarDate, datetime, timezone

from .store import EventStore

__all__ = [
    "ValidationError",
    "ConflictError",
    "UnknownUserError",
    "User",
    "PredictionRecord",
    "LeaderboardEntry",
    "SuperforecasterStatus",
    "AugmentedForecast",
    "detect_superforecasters",
    "OracleService",
    "DEFAULT_MIN_RESOLVED",
    "DEFAULT_TOP_FRACTION",
    "DEFAULT_MIN_CONSECUTIVE",
]

DEFAULT_MIN_RESOLVED = 3
DEFAULT_TOP_FRACTION = 0.1
DEFAULT_MIN_CONSECUTIVE = 3
MAX_HANDLE_LENGTH = 64


def _locked(method):
    """Serialize a service method through the instance lock."""

    @functools.wraps(method)
    def wrapper(self, *args, **kwargs):
        with self._lock:
            return method(self, *args, **kwargs)

    return wrapper


class ValidationError(ValueError):
    """Bad request input (HTTP 400)."""


class ConflictError(ValueError):
    """State conflict such as a duplicate handle or re-resolution (HTTP 409)."""


class UnknownUserError(ValueError):
    """No such user or bad credentials (HTTP 401)."""


@dataclass(frozen=True)
class User:
    id: str
    handle: str
    token: str
    created_at: datetime


@dataclass(frozen=True)
class PredictionRecord:
    id: str
    user_id: str
    symbol: str
    target_date: CalendarDate
    predicted_price: float
    submitted_at: datetime
    status: str = "open"  # open | resolved
    actual_price: float | None = None
    abs_error: float | None = None
    pct_error: float | None = None


@dataclass(frozen=True)
class LeaderboardEntry:
    user_id: str
    handle: str
    resolved_count: int
    mean_pct_error: float
    rank: int
    window_id: str


@dataclass(frozen=True)
class SuperforecasterStatus:
    user_id: str
    consecutive_top_windows: int
    flagged: bool


@dataclass(frozen=True)
class AugmentedForecast:
    """combined == weight * ml_value + (1 - weight) * human_consensus."""

    symbol: str
    target_date: CalendarDate
    ml_value: float | None
    human_consensus: float | None
    weight: float
    combined: float


def detect_superforecasters(
    window_history: list[list[LeaderboardEntry]],
    top_fraction: float = DEFAULT_TOP_FRACTION,
    min_consecutive: int = DEFAULT_MIN_CONSECUTIVE,
) -> list[SuperforecasterStatus]:
    """Streaks of top placements over ordered leaderboard windows.

    A user is "top" in a window when rank <= max(1, ceil(top_fraction * N))
    with N that window's entry count.  The streak counts consecutive top
    windows ending at the newest window; flagged when streak >= min_consecutive.
    """
    if not window_history:
        raise ValidationError("need at least one leaderboard window")
    top_sets: list[set[str]] = []
    seen: dict[str, None] = {}
    for board in window_history:
        threshold = max(1, math.ceil(top_fraction * len(board)))
        top_sets.append({e.user_id for e in board if e.rank <= threshold})
        for e in board:
            seen.setdefault(e.user_id, None)

    statuses = []
    for user_id in seen:  # insertion order keeps output deterministic
        streak = 0
        for top in reversed(top_sets):
            if user_id in top:
                streak += 1
            else:
                break
        statuses.append(
            SuperforecasterStatus(
                user_id=user_id,
                consecutive_top_windows=streak,
                flagged=streak >= min_consecutive,
            )
        )
    statuses.sort(key=lambda s: (-s.consecutive_top_windows, s.user_id))
    return statuses


def _competition_ranks(means: list[float]) -> list[int]:
    """1-based ranks over means sorted ascending; ties (to 12 decimals) share
    the lower rank and the next rank skips."""
    ranks: list[int] = []
    previous: float | None = None
    for i, value in enumerate(means):
        key = round(value, 12)
        if previous is not None and key == previous:
            ranks.append(ranks[-1])
        else:
            ranks.append(i + 1)
        previous = key
    return ranks


class OracleService:
    """In-memory state replayed from (and appended to) an event log.

    Passing ``store=None`` gives an ephemeral service for tests.  All writes
    go through _apply after the event is durably appended, so replaying the
    log reconstructs exactly this state.
    """

    def __init__(
        self,
        store: EventStore | None = None,
        *,
        min_resolved: int = DEFAULT_MIN_RESOLVED,
        top_fraction: float = DEFAULT_TOP_FRACTION,
        min_consecutive: int = DEFAULT_MIN_CONSECUTIVE,
    ):
        self.store = store
        self.min_resolved = min_resolved
        self.top_fraction = top_fraction
        self.min_consecutive = min_consecutive
        # API handlers may run in a threadpool: commands and queries share one
        # reentrant lock so every request observes a consistent snapshot
        self._lock = threading.RLock()
        self.users: dict[str, User] = {}
        self._handles: dict[str, str] = {}  # lowercased handle -> user id
        self._tokens: dict[str, str] = {}  # token -> user id
        self.open_predictions: dict[tuple[str, str, CalendarDate], PredictionRecord] = {}
        self.resolved_predictions: list[PredictionRecord] = []
        self.resolutions: dict[tuple[str, CalendarDate], float] = {}
        if store is not None:
            for event in store.replay():
                self._apply(event)

    # -- commands -------------------------------------------------------------

    @_locked
    def register_user(self, handle: str, now: datetime | None = None) -> User:
        handle = handle.strip()
        if not handle:
            raise ValidationError("handle must be nonempty")
        if len(handle) > MAX_HANDLE_LENGTH:
            raise ValidationError(f"handle longer than {MAX_HANDLE_LENGTH} characters")
        if handle.lower() in self._handles:
            raise ConflictError(f"handle {handle!r} is taken")
        event = {
            "type": "user_created",
            "id": str(uuid.uuid4()),
            "handle": handle,
            "token": secrets.token_hex(16),
            "created_at": (now or _utcnow()).isoformat(),
        }
        self._record(event)
        return self.users[event["id"]]

    @_locked
    def submit_prediction(
        self,
        user_id: str,
        symbol: str,
        target_date: CalendarDate,
        predicted_price: float,
        now: datetime | None = None,
    ) -> PredictionRecord:
        if user_id not in self.users:
            raise UnknownUserError(f"unknown user {user_id!r}")
        symbol = symbol.strip().upper()
        if not symbol:
            raise ValidationError("symbol must be nonempty")
        if not (math.isfinite(predicted_price) and predicted_price > 0):
            raise ValidationError(f"predicted price must be > 0, got {predicted_price}")
        now = now or _utcnow()
        if now.date() >= target_date:
            raise ValidationError(f"target date {target_date} is not in the future")
        if (symbol, target_date) in self.resolutions:
            raise ConflictError(f"{symbol} on {target_date} is already resolved")
        event = {
            "type": "prediction_submitted",
            "id": str(uuid.uuid4()),
            "user_id": user_id,
            "symbol": symbol,
            "target_date": target_date.isoformat(),
            "predicted_price": repr(float(predicted_price)),
            "submitted_at": now.isoformat(),
        }
        self._record(event)
        return self.open_predictions[(user_id, symbol, target_date)]

    @_locked
    def resolve_predictions(
        self, symbol: str, date: CalendarDate, actual_price: float
    ) -> int:
        symbol = symbol.strip().upper()
        if not (math.isfinite(actual_price) and actual_price > 0):
            raise ValidationError(f"actual price must be > 0, got {actual_price}")
        existing = self.resolutions.get((symbol, date))
        if existing is not None:
            if existing == float(actual_price):
                return 0  # idempotent re-resolution
            raise ConflictError(
                f"{symbol} on {date} already resolved at {existing!r}, refusing {actual_price!r}"
            )
        event = {
            "type": "prediction_resolved",
            "symbol": symbol,
            "date": date.isoformat(),
            "actual_price": repr(float(actual_price)),
        }
        before = len(self.resolved_predictions)
        self._record(event)
        return len(self.resolved_predictions) - before

    # -- queries --------------------------------------------------------------

    @_locked
    def compute_leaderboard(
        self,
        window_from: CalendarDate | None = None,
        window_to: CalendarDate | None = None,
        min_resolved: int | None = None,
    ) -> list[LeaderboardEntry]:
        """Rank users by mean percentage error over resolved predictions whose
        target date falls inside the window."""
        min_resolved = self.min_resolved if min_resolved is None else min_resolved
        if window_from and window_to and window_from > window_to:
            raise ValidationError("window_from is after window_to")
        per_user: dict[str, list[float]] = {}
        for record in self.resolved_predictions:
            if window_from and record.target_date < window_from:
                continue
            if window_to and record.target_date > window_to:
                continue
            per_user.setdefault(record.user_id, []).append(record.pct_error)

        qualified = [
            (sum(errors) / len(errors), len(errors), user_id)
            for user_id, errors in per_user.items()
            if len(errors) >= max(1, min_resolved)
        ]
        qualified.sort(key=lambda item: (item[0], self.users[item[2]].handle.lower()))
        ranks = _competition_ranks([q[0] for q in qualified])
        window_id = f"{window_from.isoformat() if window_from else '*'}..{window_to.isoformat() if window_to else '*'}"
        return [
            LeaderboardEntry(
                user_id=user_id,
                handle=self.users[user_id].handle,
                resolved_count=count,
                mean_pct_error=mean,
                rank=rank,
                window_id=window_id,
            )
            for (mean, count, user_id), rank in zip(qualified, ranks)
        ]

    @_locked
    def weekly_leaderboards(self, min_resolved: int | None = None) -> list[list[LeaderboardEntry]]:
        """One leaderboard per ISO calendar week that saw resolutions, oldest first."""
        weeks: dict[tuple[int, int], list[CalendarDate]] = {}
        for record in self.resolved_predictions:
            iso = record.target_date.isocalendar()
            weeks.setdefault((iso[0], iso[1]), []).append(record.target_date)
        boards = []
        for key in sorted(weeks):
            dates = weeks[key]
            board = self.compute_leaderboard(min(dates), max(dates), min_resolved)
            if board:
                boards.append(board)
        return boards

    @_locked
    def superforecasters(self) -> list[SuperforecasterStatus]:
        boards = self.weekly_leaderboards()
        if not boards:
            return []
        return detect_superforecasters(boards, self.top_fraction, self.min_consecutive)

    @_locked
    def augmented_forecast(
        self,
        symbol: str,
        target_date: CalendarDate,
        ml_value: float | None,
        weight: float = 0.5,
    ) -> AugmentedForecast:
        """Convex blend of the model value with the human consensus.

        The consensus is the mean of flagged superforecasters' open
        predictions for (symbol, target_date), falling back to all users'
        mean.  With no humans the result is the ml value at reported weight
        1; with no ml value it is the consensus at reported weight 0.
        """
        if not (0.0 <= weight <= 1.0):
            raise ValidationError(f"weight must lie in [0, 1], got {weight}")
        symbol = symbol.strip().upper()
        matching = [
            record
            for (_, sym, when), record in self.open_predictions.items()
            if sym == symbol and when == target_date
        ]
        consensus: float | None = None
        if matching:
            flagged = {s.user_id for s in self.superforecasters() if s.flagged}
            elite = [r for r in matching if r.user_id in flagged]
            chosen = elite if elite else matching
            consensus = sum(r.predicted_price for r in chosen) / len(chosen)

        if ml_value is not None and not (math.isfinite(ml_value) and ml_value > 0):
            raise ValidationError(f"ml value must be > 0, got {ml_value}")
        if consensus is None and ml_value is None:
            raise ValidationError(f"no forecast available for {symbol} on {target_date}")
        if consensus is None:
            weight = 1.0
            combined = ml_value
        elif ml_value is None:
            weight = 0.0
            combined = consensus
        else:
            combined = weight * ml_value + (1.0 - weight) * consensus
        return AugmentedForecast(
            symbol=symbol,
            target_date=target_date,
            ml_value=ml_value,
            human_consensus=consensus,
            weight=weight,
            combined=combined,
        )

    @_locked
    def authenticate(self, token: str) -> User:
        user_id = self._tokens.get(token)
        if user_id is None:
            raise UnknownUserError("bad token")
        return self.users[user_id]

    # -- event plumbing ---------------------------------------------------------

    def _record(self, event: dict) -> None:
        if self.store is not None:
            self.store.append(event)
        self._apply(event)

    def _apply(self, event: dict) -> None:
        kind = event["type"]
        if kind == "user_created":
            user = User(
                id=event["id"],
                handle=event["handle"],
                token=event["token"],
                created_at=datetime.fromisoformat(event["created_at"]),
            )
            self.users[user.id] = user
            self._handles[user.handle.lower()] = user.id
            self._tokens[user.token] = user.id
        elif kind == "prediction_submitted":
            record = PredictionRecord(
                id=event["id"],
                user_id=event["user_id"],
                symbol=event["symbol"],
                target_date=CalendarDate.fromisoformat(event["target_date"]),
                predicted_price=float(event["predicted_price"]),
                submitted_at=datetime.fromisoformat(event["submitted_at"]),
            )
            key = (record.user_id, record.symbol, record.target_date)
            self.open_predictions[key] = record  # resubmission: latest wins
        elif kind == "prediction_resolved":
            symbol = event["symbol"]
            when = CalendarDate.fromisoformat(event["date"])
            actual = float(event["actual_price"])
            self.resolutions[(symbol, when)] = actual
            for key in [k for k in self.open_predictions if k[1] == symbol and k[2] == when]:
                record = self.open_predictions.pop(key)
                abs_error = abs(record.predicted_price - actual)
                self.resolved_predictions.append(
                    replace(
                        record,
                        status="resolved",
                        actual_price=actual,
                        abs_error=abs_error,
                        pct_error=abs_error / actual,
                    )
                )
        else:
            raise CorruptEventError(f"unknown event type {kind!r}")


class CorruptEventError(RuntimeError):
    """The event log contains an event this version cannot apply."""


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)

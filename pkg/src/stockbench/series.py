"""Price-series ingestion, chronological splitting, scaling, windowing, and metrics.

Everything downstream (the ARIMA estimator, the neural stack, the benchmark
harness) consumes the types defined here.  All values are immutable after
construction and every operation is pure, so they can be shared freely across
threads.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date as CalendarDate
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

__all__ = [
    "DataError",
    "MissingColumnError",
    "EmptyBodyError",
    "RowParseError",
    "DuplicateDateError",
    "ConstantSeriesError",
    "PriceSeries",
    "ScalerParams",
    "WindowedDataset",
    "MetricReport",
    "load_csv",
    "chrono_split",
    "fit_minmax",
    "apply_minmax",
    "make_windows",
    "mae",
    "mse",
    "rmse",
    "score",
]


class DataError(ValueError):
    """Base class for malformed or degenerate input data."""


class MissingColumnError(DataError):
    """The CSV header lacks a required column."""


class EmptyBodyError(DataError):
    """The CSV has a header but no data rows."""


class RowParseError(DataError):
    """A CSV cell could not be parsed.  ``row`` is the 1-based data-row index."""

    def __init__(self, row: int, message: str):
        super().__init__(f"data row {row}: {message}")
        self.row = row


class DuplicateDateError(DataError):
    """Two CSV rows carry the same date.  ``row`` is the later occurrence."""

    def __init__(self, row: int, when: CalendarDate):
        super().__init__(f"data row {row}: duplicate date {when.isoformat()}")
        self.row = row
        self.date = when


class ConstantSeriesError(DataError):
    """All closes are equal, so a min-max scaler cannot be fitted."""


@dataclass(frozen=True)
class PriceSeries:
    """Ordered daily close prices for one symbol.

    Dates are strictly increasing and every close is finite and positive.
    Dates are opaque ordering keys; no trading-calendar logic is applied.
    """

    symbol: str
    dates: tuple[CalendarDate, ...]
    closes: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.dates) != len(self.closes):
            raise DataError("dates and closes differ in length")
        if len(self.dates) < 1:
            raise DataError("a price series needs at least one point")
        for i, c in enumerate(self.closes):
            if not math.isfinite(c) or c <= 0:
                raise DataError(f"close at index {i} is not finite and positive: {c!r}")
        for i in range(1, len(self.dates)):
            if self.dates[i] <= self.dates[i - 1]:
                raise DataError(
                    f"dates not strictly increasing at index {i}: "
                    f"{self.dates[i - 1]} then {self.dates[i]}"
                )

    def __len__(self) -> int:
        return len(self.dates)

    def values(self) -> np.ndarray:
        """Closes as a float64 array (fresh copy; the series stays immutable)."""
        return np.asarray(self.closes, dtype=np.float64)


@dataclass(frozen=True)
class ScalerParams:
    """Min-max bounds fitted on training data.  ``max`` strictly exceeds ``min``."""

    min: float
    max: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ConstantSeriesError("scaler bounds must be finite")
        if self.max <= self.min:
            raise ConstantSeriesError(f"max ({self.max}) must exceed min ({self.min})")


@dataclass(frozen=True)
class WindowedDataset:
    """Sliding-window supervised pairs: ``time_step`` lag values per input row.

    ``inputs`` has shape (n, time_step) and ``targets`` shape (n,) with
    n == series length - time_step.  Arrays are locked read-only.
    """

    time_step: int
    inputs: np.ndarray
    targets: np.ndarray

    def __post_init__(self) -> None:
        inputs = np.ascontiguousarray(self.inputs, dtype=np.float64)
        targets = np.ascontiguousarray(self.targets, dtype=np.float64)
        if inputs.ndim != 2 or inputs.shape[1] != self.time_step:
            raise DataError(f"inputs must be (n, {self.time_step}), got {inputs.shape}")
        if targets.shape != (inputs.shape[0],):
            raise DataError("targets must align with inputs row for row")
        inputs.setflags(write=False)
        targets.setflags(write=False)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)

    def __len__(self) -> int:
        return self.inputs.shape[0]


@dataclass(frozen=True)
class MetricReport:
    """MAE/MSE/RMSE triple, always in original price units."""

    mae: float
    mse: float
    rmse: float

    def __post_init__(self) -> None:
        if min(self.mae, self.mse, self.rmse) < 0:
            raise ValueError("metrics cannot be negative")
        if not math.isclose(self.rmse, math.sqrt(self.mse), rel_tol=1e-12, abs_tol=1e-300):
            raise ValueError("rmse must equal sqrt(mse)")


def load_csv(path: str | Path, symbol: str | None = None) -> PriceSeries:
    """Load a ``date,close`` CSV (extra OHLCV columns ignored) into a PriceSeries.

    The header must name ``date`` and ``close`` columns (case-insensitive);
    dates are ISO-8601 ``YYYY-MM-DD``.  Rows may arrive in any order and are
    sorted ascending.  Errors name the offending 1-based data row.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyBodyError(f"{path}: file is empty") from None
        lookup = {name.strip().lower(): i for i, name in enumerate(header)}
        for required in ("date", "close"):
            if required not in lookup:
                raise MissingColumnError(f"{path}: missing required column {required!r}")
        date_col, close_col = lookup["date"], lookup["close"]

        seen: dict[CalendarDate, int] = {}
        points: list[tuple[CalendarDate, float]] = []
        for row_index, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) <= max(date_col, close_col):
                raise RowParseError(row_index, f"expected {len(header)} cells, got {len(row)}")
            raw_date = row[date_col].strip()
            raw_close = row[close_col].strip()
            try:
                when = CalendarDate.fromisoformat(raw_date)
            except ValueError:
                raise RowParseError(row_index, f"unparseable date {raw_date!r}") from None
            try:
                close = float(raw_close)
            except ValueError:
                raise RowParseError(row_index, f"unparseable close {raw_close!r}") from None
            if not math.isfinite(close) or close <= 0:
                raise RowParseError(row_index, f"close must be finite and > 0, got {raw_close!r}")
            if when in seen:
                raise DuplicateDateError(row_index, when)
            seen[when] = row_index
            points.append((when, close))

    if not points:
        raise EmptyBodyError(f"{path}: no data rows")
    points.sort(key=lambda p: p[0])
    name = symbol if symbol is not None else path.stem
    return PriceSeries(
        symbol=name,
        dates=tuple(p[0] for p in points),
        closes=tuple(p[1] for p in points),
    )


def chrono_split(series: PriceSeries, train_fraction: float) -> tuple[PriceSeries, PriceSeries]:
    """Split chronologically: first floor(L * fraction) points train, rest test.

    No shuffling; concatenating the halves reproduces the input exactly.
    Raises ValueError when either side would be empty.
    """
    if not (0.0 < train_fraction < 1.0):
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n = len(series)
    if n < 2:
        raise ValueError("need at least two points to split")
    k = int(math.floor(n * train_fraction))
    if k == 0 or k == n:
        raise ValueError(f"fraction {train_fraction} leaves an empty side for length {n}")
    train = PriceSeries(series.symbol, series.dates[:k], series.closes[:k])
    test = PriceSeries(series.symbol, series.dates[k:], series.closes[k:])
    return train, test


def fit_minmax(series: PriceSeries) -> ScalerParams:
    """Fit min-max bounds.  Fit on the TRAIN split only; scaling test data with
    train bounds is the leakage rule enforced by the benchmark pipeline."""
    if len(series) < 2:
        raise ValueError("need at least two points to fit a scaler")
    lo = min(series.closes)
    hi = max(series.closes)
    if hi == lo:
        raise ConstantSeriesError("constant series: min-max scaler is degenerate")
    return ScalerParams(min=lo, max=hi)


def apply_minmax(
    values: Sequence[float] | np.ndarray,
    params: ScalerParams,
    direction: Literal["forward", "inverse"] = "forward",
) -> np.ndarray:
    """Map values into [0, 1] (forward) or back to price units (inverse).

    No clamping: out-of-range inputs map linearly outside [0, 1], since test
    data may exceed the train min/max.
    """
    arr = np.asarray(values, dtype=np.float64)
    span = params.max - params.min
    if direction == "forward":
        return (arr - params.min) / span
    if direction == "inverse":
        return arr * span + params.min
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def make_windows(values: Sequence[float] | np.ndarray, time_step: int) -> WindowedDataset:
    """Build lag windows: inputs[i] = values[i : i+time_step], targets[i] = values[i+time_step]."""
    if time_step < 1:
        raise ValueError(f"time_step must be >= 1, got {time_step}")
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError("values must be one-dimensional")
    n = arr.shape[0] - time_step
    if n < 1:
        raise DataError(
            f"series of length {arr.shape[0]} too short for time_step {time_step}"
        )
    inputs = np.empty((n, time_step), dtype=np.float64)
    for i in range(n):
        inputs[i] = arr[i : i + time_step]
    targets = arr[time_step:].copy()
    return WindowedDataset(time_step=time_step, inputs=inputs, targets=targets)


def _paired(predicted, actual) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(predicted, dtype=np.float64)
    a = np.asarray(actual, dtype=np.float64)
    if p.shape != a.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {a.shape}")
    if p.size == 0:
        raise ValueError("metrics need at least one pair")
    return p, a


def mae(predicted, actual) -> float:
    """Mean absolute error."""
    p, a = _paired(predicted, actual)
    return float(np.mean(np.abs(p - a)))


def mse(predicted, actual) -> float:
    """Mean squared error."""
    p, a = _paired(predicted, actual)
    return float(np.mean((p - a) ** 2))


def rmse(predicted, actual) -> float:
    """Root mean squared error."""
    return math.sqrt(mse(predicted, actual))


def score(predicted, actual) -> MetricReport:
    """All three metrics in one report."""
    m = mse(predicted, actual)
    return MetricReport(mae=mae(predicted, actual), mse=m, rmse=math.sqrt(m))

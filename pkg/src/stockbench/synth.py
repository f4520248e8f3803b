"""Synthetic price series for demos and tests.

The benchmark accepts any OHLC CSV; these generators exist so the repo works
out of the box without downloading market data.
"""

from __future__ import annotations

import csv
import math
from datetime import date as CalendarDate, timedelta
from pathlib import Path

import numpy as np

from .series import PriceSeries

__all__ = ["sine_series", "random_walk_series", "write_csv"]


def _dates(n: int, start: CalendarDate) -> tuple[CalendarDate, ...]:
    return tuple(start + timedelta(days=i) for i in range(n))


def sine_series(
    n: int = 500,
    *,
    period: float = 50.0,
    amplitude: float = 10.0,
    base: float = 100.0,
    noise: float = 0.0,
    seed: int = 0,
    start: CalendarDate = CalendarDate(2020, 1, 1),
    symbol: str = "SINE",
) -> PriceSeries:
    """A sinusoid around ``base``; optional Gaussian noise stays reproducible."""
    if base - amplitude - 4 * noise <= 0:
        raise ValueError("parameters would produce non-positive prices")
    t = np.arange(n, dtype=np.float64)
    closes = base + amplitude * np.sin(2.0 * math.pi * t / period)
    if noise > 0:
        rng = np.random.default_rng(seed)
        closes = closes + rng.normal(0.0, noise, size=n)
    closes = np.maximum(closes, 1e-6)
    return PriceSeries(symbol, _dates(n, start), tuple(float(c) for c in closes))


def random_walk_series(
    n: int = 500,
    *,
    start_price: float = 100.0,
    drift: float = 0.0002,
    vol: float = 0.01,
    seed: int = 0,
    start: CalendarDate = CalendarDate(2020, 1, 1),
    symbol: str = "WALK",
) -> PriceSeries:
    """Geometric random walk, strictly positive by construction."""
    rng = np.random.default_rng(seed)
    steps = rng.normal(drift, vol, size=n - 1)
    log_prices = math.log(start_price) + np.concatenate([[0.0], np.cumsum(steps)])
    closes = np.exp(log_prices)
    return PriceSeries(symbol, _dates(n, start), tuple(float(c) for c in closes))


def write_csv(series: PriceSeries, path: str | Path) -> Path:
    """Write ``date,close`` rows loadable by ``series.load_csv``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "close"])
        for when, close in zip(series.dates, series.closes):
            writer.writerow([when.isoformat(), repr(close)])
    return path

"""Benchmark harness: train the zoo on a price CSV and emit a score table.

Pipeline per run: chronological split, min-max scaling fitted on the train
split only, lag-window construction, model training, one-step predictions
over both splits with true lagged inputs (teacher forcing), inverse scaling,
and MAE/MSE/RMSE in original price units.

Outputs: ``scores.csv`` plus one ``pred_<model>.csv`` per model (and figures
rendered from the same data unless disabled).  Multi-step forecasting rolls
model output back into the input window; ARIMA forecasts use the fitted
recursion directly.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass
from datetime import date as CalendarDate
from pathlib import Path

import numpy as np

from . import arima
from .nn import NetworkModel, TrainConfig
from .series import (
    MetricReport,
    PriceSeries,
    ScalerParams,
    apply_minmax,
    chrono_split,
    fit_minmax,
    load_csv,
    make_windows,
    mae,
    score,
)
from .zoo import (
    DEFAULT_ARIMA_P,
    DEFAULT_ARIMA_Q,
    TABLE_ORDER,
    arima_grid_config,
    build_network,
)

__all__ = [
    "BenchConfig",
    "ScoreRow",
    "ScoreTable",
    "ModelRun",
    "BenchResult",
    "ForecastBundle",
    "parse_config_file",
    "run_benchmark",
    "export_predictions",
    "write_scores_csv",
    "naive_last_value_mae",
    "forecast_prices",
    "roll_forward_network",
    "save_bundle",
    "load_bundle",
    "bundle_from_run",
]

BUNDLE_FORMAT = "stockbench-bundle-v1"
SCORES_HEADER = "model,train_rmse,test_rmse,train_mae,test_mae,train_seconds"
PRED_HEADER = "date,split,actual,predicted"


@dataclass(frozen=True)
class BenchConfig:
    """One benchmark run.  Training defaults are 50 epochs at batch size 1;
    everything else (window length, split, grid, seed) is configurable."""

    data_path: Path
    output_dir: Path = Path("bench_out")
    time_step: int = 10
    train_fraction: float = 0.8
    epochs: int = 50
    seed: int = 42
    learning_rate: float = 0.001
    shuffle: bool = True
    models: tuple[str, ...] = TABLE_ORDER
    arima_p: tuple[int, ...] = DEFAULT_ARIMA_P
    arima_q: tuple[int, ...] = DEFAULT_ARIMA_Q
    plots: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "data_path", Path(self.data_path))
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        if self.time_step < 1 or self.epochs < 1:
            raise ValueError("time_step and epochs must be positive")
        if not (0.0 < self.train_fraction < 1.0):
            raise ValueError("train_fraction must lie in (0, 1)")
        if not self.models:
            raise ValueError("select at least one model")
        unknown = [m for m in self.models if m not in TABLE_ORDER]
        if unknown:
            raise ValueError(f"unknown models {unknown}; choose from {list(TABLE_ORDER)}")
        # fixed report order regardless of how the selection was written
        ordered = tuple(m for m in TABLE_ORDER if m in self.models)
        object.__setattr__(self, "models", ordered)
        arima_grid_config(self.arima_p, self.arima_q)


_BOOL_KEYS = {"shuffle", "plots"}
_INT_KEYS = {"time_step", "epochs", "seed"}
_FLOAT_KEYS = {"train_fraction", "learning_rate"}
_LIST_KEYS = {"models", "arima_p", "arima_q"}
_PATH_KEYS = {"data_path", "output_dir"}


def parse_config_file(path: str | Path) -> dict:
    """Flat ``key = value`` file; '#' starts a comment.  Unknown keys error."""
    values: dict = {}
    known = _BOOL_KEYS | _INT_KEYS | _FLOAT_KEYS | _LIST_KEYS | _PATH_KEYS
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, value)
    return values


def _coerce(key: str, value: str):
    if key in _BOOL_KEYS:
        low = value.lower()
        if low in ("true", "1", "yes", "on"):
            return True
        if low in ("false", "0", "no", "off"):
            return False
        raise ValueError(f"{key}: expected a boolean, got {value!r}")
    if key in _INT_KEYS:
        return int(value)
    if key in _FLOAT_KEYS:
        return float(value)
    if key in _PATH_KEYS:
        return Path(value)
    if key == "models":
        return tuple(v.strip() for v in value.split(",") if v.strip())
    return tuple(int(v) for v in value.replace(",", " ").split())


@dataclass(frozen=True)
class ScoreRow:
    """One Table-1-shaped row, metrics in original price units."""

    name: str
    train_rmse: float
    test_rmse: float
    train_mae: float
    test_mae: float
    train_seconds: float

    def __post_init__(self) -> None:
        metrics = (self.train_rmse, self.test_rmse, self.train_mae, self.test_mae)
        if not all(math.isfinite(v) and v >= 0 for v in metrics):
            raise ValueError(f"metrics for {self.name} must be finite and non-negative")


@dataclass(frozen=True)
class ScoreTable:
    rows: tuple[ScoreRow, ...]
    failures: tuple[tuple[str, str], ...] = ()


@dataclass
class ModelRun:
    """Everything one model produced: aligned predictions plus diagnostics."""

    name: str
    train_dates: tuple[CalendarDate, ...]
    train_actual: np.ndarray
    train_pred: np.ndarray
    test_dates: tuple[CalendarDate, ...]
    test_actual: np.ndarray
    test_pred: np.ndarray
    train_report: MetricReport
    test_report: MetricReport
    train_seconds: float
    history: list[float] | None = None
    model: object | None = None
    grid: arima.GridResult | None = None


@dataclass
class BenchResult:
    config: BenchConfig
    series: PriceSeries
    scaler: ScalerParams
    table: ScoreTable
    runs: dict[str, ModelRun]
    naive_test_mae: float


def naive_last_value_mae(train: PriceSeries, test: PriceSeries) -> float:
    """MAE of the 'tomorrow equals today' baseline over the test split."""
    actual = test.values()
    naive = np.concatenate([[train.closes[-1]], actual[:-1]])
    return mae(naive, actual)


def run_benchmark(config: BenchConfig) -> BenchResult:
    """Train every selected model and score it on both splits.

    A model that fails to train becomes a failure entry; the other models
    still run.  Deterministic given the config seed (timing column aside).
    """
    series = load_csv(config.data_path)
    train, test = chrono_split(series, config.train_fraction)
    if len(train) <= config.time_step + 1:
        raise ValueError(
            f"train split of {len(train)} points cannot feed time_step {config.time_step}"
        )
    scaler = fit_minmax(train)
    scaled = apply_minmax(series.values(), scaler)
    train_ds = make_windows(scaled[: len(train)], config.time_step)
    test_ds = make_windows(scaled[len(train) - config.time_step :], config.time_step)

    rows: list[ScoreRow] = []
    failures: list[tuple[str, str]] = []
    runs: dict[str, ModelRun] = {}
    for name in config.models:
        try:
            if name == "ARIMA":
                run = _run_arima(config, train, test)
            else:
                run = _run_network(config, name, train, test, scaler, train_ds, test_ds)
            runs[name] = run
            rows.append(
                ScoreRow(
                    name=name,
                    train_rmse=run.train_report.rmse,
                    test_rmse=run.test_report.rmse,
                    train_mae=run.train_report.mae,
                    test_mae=run.test_report.mae,
                    train_seconds=run.train_seconds,
                )
            )
        except Exception as exc:
            failures.append((name, f"{type(exc).__name__}: {exc}"))

    return BenchResult(
        config=config,
        series=series,
        scaler=scaler,
        table=ScoreTable(rows=tuple(rows), failures=tuple(failures)),
        runs=runs,
        naive_test_mae=naive_last_value_mae(train, test),
    )


def _run_network(
    config: BenchConfig,
    name: str,
    train: PriceSeries,
    test: PriceSeries,
    scaler: ScalerParams,
    train_ds,
    test_ds,
) -> ModelRun:
    model = build_network(name, config.time_step, seed=config.seed)
    train_config = TrainConfig(
        epochs=config.epochs, learning_rate=config.learning_rate, shuffle=config.shuffle
    )
    started = time.perf_counter()
    history = model.fit(train_ds, train_config)
    elapsed = time.perf_counter() - started

    train_pred = apply_minmax(model.predict(train_ds.inputs), scaler, "inverse")
    test_pred = apply_minmax(model.predict(test_ds.inputs), scaler, "inverse")
    train_actual = train.values()[config.time_step :]
    test_actual = test.values()
    return ModelRun(
        name=name,
        train_dates=train.dates[config.time_step :],
        train_actual=train_actual,
        train_pred=train_pred,
        test_dates=test.dates,
        test_actual=test_actual,
        test_pred=test_pred,
        train_report=score(train_pred, train_actual),
        test_report=score(test_pred, test_actual),
        train_seconds=elapsed,
        history=history,
        model=model,
    )


def _run_arima(config: BenchConfig, train: PriceSeries, test: PriceSeries) -> ModelRun:
    p_params, q_params = arima_grid_config(config.arima_p, config.arima_q)
    grid = arima.grid_search(train.values(), test.values(), p_params, q_params)
    best_order = grid.entries[grid.best].order
    model = arima.fit(train.values(), best_order)
    train_pred, _ = arima.one_step_in_sample(model, train.values())
    test_pred = arima.predict_one_step(model, train.values(), test.values())
    return ModelRun(
        name="ARIMA",
        train_dates=train.dates,
        train_actual=train.values(),
        train_pred=train_pred,
        test_dates=test.dates,
        test_actual=test.values(),
        test_pred=test_pred,
        train_report=score(train_pred, train.values()),
        test_report=score(test_pred, test.values()),
        train_seconds=grid.entries[grid.best].train_seconds,
        model=model,
        grid=grid,
    )


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_scores_csv(table: ScoreTable, output_dir: str | Path) -> Path:
    """``scores.csv`` with full-precision floats, rows in table order."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    lines = [SCORES_HEADER]
    for row in table.rows:
        lines.append(
            ",".join(
                [
                    row.name,
                    repr(row.train_rmse),
                    repr(row.test_rmse),
                    repr(row.train_mae),
                    repr(row.test_mae),
                    repr(row.train_seconds),
                ]
            )
        )
    path = output_dir / "scores.csv"
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def export_predictions(result: BenchResult, output_dir: str | Path | None = None) -> list[Path]:
    """Write scores.csv and one pred_<model>.csv per model.

    Prediction files carry train rows (flagged by the split column) followed
    by exactly the test rows; floats use full-precision repr so the reported
    metrics recompute exactly from the files.
    """
    if not result.runs:
        raise ValueError("no model produced predictions; nothing to export")
    output_dir = Path(output_dir) if output_dir is not None else result.config.output_dir
    output_dir.mkdir(parents=True, exist_ok=True)
    written = [write_scores_csv(result.table, output_dir)]
    for name, run in result.runs.items():
        lines = [PRED_HEADER]
        for when, actual, predicted in zip(run.train_dates, run.train_actual, run.train_pred):
            lines.append(f"{when.isoformat()},train,{float(actual)!r},{float(predicted)!r}")
        for when, actual, predicted in zip(run.test_dates, run.test_actual, run.test_pred):
            lines.append(f"{when.isoformat()},test,{float(actual)!r},{float(predicted)!r}")
        path = output_dir / f"pred_{name}.csv"
        _atomic_write(path, "\n".join(lines) + "\n")
        written.append(path)
    return written


# -- multi-step forecasting ---------------------------------------------------


def roll_forward_network(
    model: NetworkModel,
    scaler: ScalerParams,
    last_window_prices,
    horizon: int,
) -> np.ndarray:
    """Feed predictions back as inputs for ``horizon`` steps; returns prices."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    window = list(apply_minmax(np.asarray(last_window_prices, dtype=np.float64), scaler))
    if len(window) != model.time_step:
        raise ValueError(f"need exactly {model.time_step} seed prices, got {len(window)}")
    out = np.empty(horizon)
    for step in range(horizon):
        pred = float(model.predict([window])[0])
        out[step] = pred
        window = window[1:] + [pred]
    return apply_minmax(out, scaler, "inverse")


@dataclass(frozen=True)
class ForecastBundle:
    """A trained model frozen together with everything needed to forecast:
    scaler bounds, the raw price history, and the last observed date."""

    model_name: str
    kind: str  # "network" | "arima"
    symbol: str
    time_step: int
    last_date: CalendarDate
    history: tuple[float, ...]
    scaler: ScalerParams | None
    network: dict | None = None
    arima_params: dict | None = None

    def forecast(self, horizon: int) -> np.ndarray:
        if self.kind == "network":
            model = NetworkModel.from_dict(self.network)
            return roll_forward_network(
                model, self.scaler, self.history[-self.time_step :], horizon
            )
        model = _arima_from_dict(self.arima_params)
        return arima.forecast(model, np.asarray(self.history), horizon)

    def forecast_for_date(self, target: CalendarDate) -> float:
        """Value at ``target``, rolling one step per calendar day past the data."""
        horizon = max(1, (target - self.last_date).days)
        return float(self.forecast(horizon)[-1])


def _arima_to_dict(model: arima.ArimaModel) -> dict:
    return {
        "order": [model.order.p, model.order.d, model.order.q],
        "intercept": model.intercept,
        "ar_coeffs": list(model.ar_coeffs),
        "ma_coeffs": list(model.ma_coeffs),
        "sigma2": model.sigma2,
    }


def _arima_from_dict(payload: dict) -> arima.ArimaModel:
    p, d, q = payload["order"]
    return arima.ArimaModel(
        order=arima.ArimaOrder(p, d, q),
        intercept=payload["intercept"],
        ar_coeffs=tuple(payload["ar_coeffs"]),
        ma_coeffs=tuple(payload["ma_coeffs"]),
        sigma2=payload["sigma2"],
        residuals=(),
        train_seconds=0.0,
    )


def bundle_from_run(result: BenchResult, name: str) -> ForecastBundle:
    run = result.runs[name]
    series = result.series
    common = dict(
        model_name=name,
        symbol=series.symbol,
        time_step=result.config.time_step,
        last_date=series.dates[-1],
        history=series.closes,
    )
    if name == "ARIMA":
        return ForecastBundle(
            kind="arima", scaler=None, arima_params=_arima_to_dict(run.model), **common
        )
    return ForecastBundle(
        kind="network", scaler=result.scaler, network=run.model.to_dict(), **common
    )


def save_bundle(bundle: ForecastBundle, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "format": BUNDLE_FORMAT,
        "model_name": bundle.model_name,
        "kind": bundle.kind,
        "symbol": bundle.symbol,
        "time_step": bundle.time_step,
        "last_date": bundle.last_date.isoformat(),
        "history": list(bundle.history),
        "scaler": {"min": bundle.scaler.min, "max": bundle.scaler.max} if bundle.scaler else None,
        "network": bundle.network,
        "arima": bundle.arima_params,
    }
    _atomic_write(path, json.dumps(payload))
    return path


def load_bundle(path: str | Path) -> ForecastBundle:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format") != BUNDLE_FORMAT:
        raise ValueError(f"unsupported bundle format {payload.get('format')!r}")
    scaler = payload.get("scaler")
    return ForecastBundle(
        model_name=payload["model_name"],
        kind=payload["kind"],
        symbol=payload["symbol"],
        time_step=int(payload["time_step"]),
        last_date=CalendarDate.fromisoformat(payload["last_date"]),
        history=tuple(payload["history"]),
        scaler=ScalerParams(**scaler) if scaler else None,
        network=payload.get("network"),
        arima_params=payload.get("arima"),
    )


def forecast_prices(config: BenchConfig, model_name: str, horizon: int) -> np.ndarray:
    """Train ``model_name`` on the full series and forecast ``horizon`` steps.

    Neural models fit their scaler on the whole series (no held-out split is
    involved when forecasting the future) and roll predictions forward; ARIMA
    selects its order on the configured split, refits on everything, and
    iterates its conditional expectation.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if model_name not in TABLE_ORDER:
        raise ValueError(f"unknown model {model_name!r}; choose from {list(TABLE_ORDER)}")
    bundle = train_bundle(config, model_name)
    return bundle.forecast(horizon)


def train_bundle(config: BenchConfig, model_name: str) -> ForecastBundle:
    """Fit one model on the full series and package it as a ForecastBundle."""
    series = load_csv(config.data_path)
    if model_name == "ARIMA":
        train, test = chrono_split(series, config.train_fraction)
        p_params, q_params = arima_grid_config(config.arima_p, config.arima_q)
        grid = arima.grid_search(train.values(), test.values(), p_params, q_params)
        best_order = grid.entries[grid.best].order
        model = arima.fit(series.values(), best_order)
        return ForecastBundle(
            model_name="ARIMA",
            kind="arima",
            symbol=series.symbol,
            time_step=config.time_step,
            last_date=series.dates[-1],
            history=series.closes,
            scaler=None,
            arima_params=_arima_to_dict(model),
        )
    scaler = fit_minmax(series)
    scaled = apply_minmax(series.values(), scaler)
    dataset = make_windows(scaled, config.time_step)
    model = build_network(model_name, config.time_step, seed=config.seed)
    model.fit(
        dataset,
        TrainConfig(
            epochs=config.epochs, learning_rate=config.learning_rate, shuffle=config.shuffle
        ),
    )
    return ForecastBundle(
        model_name=model_name,
        kind="network",
        symbol=series.symbol,
        time_step=config.time_step,
        last_date=series.dates[-1],
        history=series.closes,
        scaler=scaler,
        network=model.to_dict(),
    )

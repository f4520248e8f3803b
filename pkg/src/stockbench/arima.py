"""ARIMA(p, 0, q) fitting by conditional least squares, forecasting, and grid search.

Estimation minimizes the conditional sum of squared one-step residuals with
pre-sample shocks set to zero and pre-sample observations set to the series
mean.  The minimizer is L-BFGS-B with numeric gradients, started from
intercept = series mean and all AR/MA coefficients = 0, which keeps fits
deterministic for identical inputs.

The ``intercept`` is the regression constant c in

    y_t = c + sum_i ar[i] * y_{t-i} + sum_j ma[j] * eps_{t-j} + eps_t

so the long-run mean of a stationary AR(1) is c / (1 - ar[0]).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .series import mae as _mae

__all__ = [
    "ArimaOrder",
    "ArimaModel",
    "ArimaError",
    "GridEntry",
    "GridResult",
    "fit",
    "one_step_in_sample",
    "predict_one_step",
    "forecast",
    "grid_search",
]

MAX_ITER = 500
FTOL = 1e-10


class ArimaError(ValueError):
    """Raised for unusable inputs or a grid in which every cell failed."""


@dataclass(frozen=True)
class ArimaOrder:
    """(p, d, q) orders.  Only d == 0 is supported."""

    p: int
    d: int
    q: int

    def __post_init__(self) -> None:
        if self.p < 0 or self.d < 0 or self.q < 0:
            raise ArimaError(f"orders must be non-negative, got {self}")


@dataclass(frozen=True)
class ArimaModel:
    """A fitted ARMA model plus its in-sample diagnostics.

    ``converged`` is False when the optimizer hit the iteration cap; the
    coefficients are then best-so-far.  ``warnings`` flags non-stationary AR
    polynomials (roots inside the unit circle) rather than rejecting them,
    since excluding such cells would change the grid-search argmin.
    """

    order: ArimaOrder
    intercept: float
    ar_coeffs: tuple[float, ...]
    ma_coeffs: tuple[float, ...]
    sigma2: float
    residuals: tuple[float, ...]
    train_seconds: float
    converged: bool = True
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.ar_coeffs) != self.order.p or len(self.ma_coeffs) != self.order.q:
            raise ArimaError("coefficient counts must match the order")
        if self.sigma2 < 0:
            raise ArimaError("sigma2 cannot be negative")


@dataclass(frozen=True)
class GridEntry:
    """One grid cell: either a scored fit or a recorded failure."""

    order: ArimaOrder
    mae: float | None
    train_seconds: float
    error: str | None = None


@dataclass(frozen=True)
class GridResult:
    """All grid cells in (p, q) order plus the index of the winning cell."""

    entries: tuple[GridEntry, ...]
    best: int


def _recursion(
    values: np.ndarray,
    intercept: float,
    ar: np.ndarray,
    ma: np.ndarray,
    pad_mean: float,
) -> tuple[np.ndarray, np.ndarray]:
    """One-step conditional expectations and residuals over ``values``.

    Lags before the first observation use ``pad_mean``; pre-sample shocks are
    zero.  Returns (predictions, residuals), both aligned with ``values``.
    """
    n = values.shape[0]
    p = ar.shape[0]
    q = ma.shape[0]
    if q == 0:
        # Pure AR: no recursion through the shocks, fully vectorizable.
        preds = np.full(n, intercept, dtype=np.float64)
        if p:
            padded = np.concatenate([np.full(p, pad_mean), values])
            with np.errstate(over="ignore", invalid="ignore"):
                for i in range(1, p + 1):
                    preds += ar[i - 1] * padded[p - i : p - i + n]
        return preds, values - preds

    padded = np.concatenate([np.full(max(p, 1), pad_mean), values])
    off = max(p, 1)
    eps = np.zeros(off + n, dtype=np.float64)  # leading zeros double as pre-sample shocks
    preds = np.empty(n, dtype=np.float64)
    ar_l = ar.tolist()
    ma_l = ma.tolist()
    pad_l = padded.tolist()
    eps_l = eps.tolist()
    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(n):
            acc = intercept
            for i in range(p):
                acc += ar_l[i] * pad_l[off + t - 1 - i]
            for j in range(q):
                k = off + t - 1 - j
                if k >= off:
                    acc += ma_l[j] * eps_l[k]
                # pre-sample shocks are zero: skip
            preds[t] = acc
            eps_l[off + t] = pad_l[off + t] - acc
    return preds, values - preds


def fit(series, order: ArimaOrder, *, max_iter: int = MAX_ITER, ftol: float = FTOL) -> ArimaModel:
    """Fit an ARMA(p, q) model to ``series`` by conditional least squares."""
    y = np.asarray(series, dtype=np.float64)
    if y.ndim != 1:
        raise ArimaError("series must be one-dimensional")
    if not np.all(np.isfinite(y)):
        raise ArimaError("series contains non-finite values")
    if order.d != 0:
        raise ArimaError(f"d must be 0, got {order.d}")
    p, q = order.p, order.q
    if y.shape[0] < p + q + 2:
        raise ArimaError(f"series of length {y.shape[0]} too short for order ({p},0,{q})")

    pad_mean = float(np.mean(y))
    started = time.perf_counter()

    def objective(theta: np.ndarray) -> float:
        _, eps = _recursion(y, theta[0], theta[1 : 1 + p], theta[1 + p :], pad_mean)
        with np.errstate(over="ignore", invalid="ignore"):
            sse = float(np.dot(eps, eps))
        # an exploding recursion yields inf/nan: hand the optimizer a finite
        # wall so it backtracks instead of propagating the poison
        return sse if math.isfinite(sse) else 1e300

    x0 = np.zeros(1 + p + q, dtype=np.float64)
    x0[0] = pad_mean
    result = minimize(
        objective,
        x0,
        method="L-BFGS-B",
        options={"maxiter": max_iter, "ftol": ftol},
    )
    elapsed = time.perf_counter() - started

    theta = result.x
    intercept = float(theta[0])
    ar = tuple(float(v) for v in theta[1 : 1 + p])
    ma = tuple(float(v) for v in theta[1 + p :])
    _, eps = _recursion(y, intercept, np.asarray(ar), np.asarray(ma), pad_mean)

    warnings: list[str] = []
    if p and _has_root_inside_unit_circle(ar):
        warnings.append("AR polynomial has a root inside the unit circle (non-stationary fit)")

    converged = bool(result.success) or "CONVERGENCE" in str(result.message).upper()
    return ArimaModel(
        order=order,
        intercept=intercept,
        ar_coeffs=ar,
        ma_coeffs=ma,
        sigma2=float(np.mean(eps**2)),
        residuals=tuple(float(e) for e in eps),
        train_seconds=elapsed,
        converged=converged if result.nit < max_iter else False,
        warnings=tuple(warnings),
    )


def _has_root_inside_unit_circle(ar: tuple[float, ...]) -> bool:
    # Stationarity needs every root of 1 - ar[0] z - ... - ar[p-1] z^p to lie
    # strictly outside the unit circle; a root inside or on it gets flagged.
    coeffs = np.concatenate([[-c for c in ar[::-1]], [1.0]])  # highest degree first
    coeffs = np.trim_zeros(coeffs, "f")
    if coeffs.size < 2:
        return False
    roots = np.roots(coeffs)
    return bool(np.any(np.abs(roots) <= 1.0 + 1e-9))


def one_step_in_sample(model: ArimaModel, values) -> tuple[np.ndarray, np.ndarray]:
    """Replay the fit recursion over ``values`` (padding with their own mean).

    With ``values`` equal to the training series this reproduces the stored
    residuals exactly; it backs both the residual-consistency check and the
    benchmark's in-sample predictions.
    """
    y = np.asarray(values, dtype=np.float64)
    return _recursion(
        y,
        model.intercept,
        np.asarray(model.ar_coeffs, dtype=np.float64),
        np.asarray(model.ma_coeffs, dtype=np.float64),
        float(np.mean(y)),
    )


def predict_one_step(model: ArimaModel, history, horizon_points) -> np.ndarray:
    """Rolling one-step-ahead predictions over an evaluation segment.

    Parameters stay frozen; each prediction conditions on all actuals before
    it (first the history, then the realized horizon points as the origin
    rolls forward).  Output length equals ``len(horizon_points)``.
    """
    h = np.asarray(history, dtype=np.float64)
    z = np.asarray(horizon_points, dtype=np.float64)
    needed = max(model.order.p, model.order.q)
    if h.shape[0] < needed:
        raise ArimaError(f"history of length {h.shape[0]} shorter than max(p, q) = {needed}")
    full = np.concatenate([h, z])
    pad_mean = float(np.mean(h)) if h.size else (float(np.mean(z)) if z.size else 0.0)
    preds, _ = _recursion(
        full,
        model.intercept,
        np.asarray(model.ar_coeffs, dtype=np.float64),
        np.asarray(model.ma_coeffs, dtype=np.float64),
        pad_mean,
    )
    return preds[h.shape[0] :]


def forecast(model: ArimaModel, history, h: int) -> np.ndarray:
    """Iterated h-step-ahead forecast with future shocks set to zero.

    Beyond q steps a pure MA model flattens to the intercept; a stationary
    AR model decays geometrically toward intercept / (1 - sum of AR weights).
    """
    if h < 1:
        raise ArimaError(f"horizon must be >= 1, got {h}")
    y = np.asarray(history, dtype=np.float64)
    p, q = model.order.p, model.order.q
    needed = max(p, q)
    if y.shape[0] < needed:
        raise ArimaError(f"history of length {y.shape[0]} shorter than max(p, q) = {needed}")

    pad_mean = float(np.mean(y)) if y.size else 0.0
    ar = np.asarray(model.ar_coeffs, dtype=np.float64)
    ma = np.asarray(model.ma_coeffs, dtype=np.float64)
    _, eps = _recursion(y, model.intercept, ar, ma, pad_mean)

    vals = list(y)
    shocks = list(eps)
    out = np.empty(h, dtype=np.float64)
    for step in range(h):
        acc = model.intercept
        for i in range(p):
            k = len(vals) - 1 - i
            acc += ar[i] * (vals[k] if k >= 0 else pad_mean)
        for j in range(q):
            k = len(shocks) - 1 - j
            if k >= 0:
                acc += ma[j] * shocks[k]
        out[step] = acc
        vals.append(acc)
        shocks.append(0.0)  # future shocks at their conditional mean
    return out


def grid_search(train, eval_actuals, p_params, q_params) -> GridResult:
    """Fit every (p, 0, q) combination on ``train`` and score one-step MAE on
    ``eval_actuals``.

    Cells are visited in (p, q) order; failed fits become failed entries and
    are excluded from the argmin.  Ties (MAE equal to 12 decimals) break
    toward smaller p + q, then smaller p.
    """
    p_list = list(p_params)
    q_list = list(q_params)
    if not p_list or not q_list:
        raise ArimaError("candidate lists must be nonempty")
    train_arr = np.asarray(train, dtype=np.float64)
    eval_arr = np.asarray(eval_actuals, dtype=np.float64)

    entries: list[GridEntry] = []
    for p in sorted(p_list):
        for q in sorted(q_list):
            order = ArimaOrder(p, 0, q)
            started = time.perf_counter()
            try:
                model = fit(train_arr, order)
                preds = predict_one_step(model, train_arr, eval_arr)
                cell_mae = _mae(preds, eval_arr)
                entries.append(GridEntry(order, cell_mae, model.train_seconds))
            except Exception as exc:  # per-cell isolation: one bad cell must not kill the grid
                entries.append(
                    GridEntry(order, None, time.perf_counter() - started, error=str(exc))
                )

    scored = [
        (round(e.mae, 12), e.order.p + e.order.q, e.order.p, i)
        for i, e in enumerate(entries)
        if e.error is None and e.mae is not None and math.isfinite(e.mae)
    ]
    if not scored:
        raise ArimaError("every grid cell failed")
    best = min(scored)[3]
    return GridResult(entries=tuple(entries), best=best)

"""HTTP JSON API over the oracle service.

Prices travel as decimal strings to avoid float wire drift; dates are
ISO-8601.  Errors render as {"code", "message"} with conventional status
codes: 400 validation, 401 auth, 409 conflict.

    POST /users {handle}                          -> 201 {id, handle, token}
    POST /predictions (bearer token)              -> 201 prediction record
    POST /resolutions (admin bearer token)        -> 200 {resolved_count}
    GET  /leaderboard?from=&to=&min_resolved=     -> 200 [entries]
    GET  /superforecasters                        -> 200 [statuses]
    GET  /forecast/{symbol}?target_date=&weight=  -> 200 augmented forecast
"""

from __future__ import annotations

import math
from datetime import date as CalendarDate, datetime
from typing import Callable

from fastapi import Depends, FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

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
)

__all__ = ["create_app", "MlProvider"]

# Given (symbol, target_date), return the model's price or None when the
# symbol has no configured checkpoint.
MlProvider = Callable[[str, CalendarDate], float | None]


class RegisterBody(BaseModel):
    handle: str


class PredictionBody(BaseModel):
    symbol: str
    target_date: str
    predicted_price: str | float


class ResolutionBody(BaseModel):
    symbol: str
    date: str
    actual_price: str | float


def _price(value: str | float, field: str) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{field} must be a decimal string") from None
    if not math.isfinite(out):
        raise ValidationError(f"{field} must be finite")
    return out


def _date(value: str, field: str) -> CalendarDate:
    try:
        return CalendarDate.fromisoformat(value)
    except ValueError:
        raise ValidationError(f"{field} must be an ISO date (YYYY-MM-DD)") from None


def _price_str(value: float | None) -> str | None:
    return None if value is None else repr(float(value))


def _record_json(record: PredictionRecord) -> dict:
    return {
        "id": record.id,
        "user_id": record.user_id,
        "symbol": record.symbol,
        "target_date": record.target_date.isoformat(),
        "predicted_price": _price_str(record.predicted_price),
        "submitted_at": record.submitted_at.isoformat(),
        "status": record.status,
        "actual_price": _price_str(record.actual_price),
        "abs_error": _price_str(record.abs_error),
        "pct_error": None if record.pct_error is None else repr(record.pct_error),
    }


def _entry_json(entry: LeaderboardEntry) -> dict:
    return {
        "user_id": entry.user_id,
        "handle": entry.handle,
        "resolved_count": entry.resolved_count,
        "mean_pct_error": repr(entry.mean_pct_error),
        "rank": entry.rank,
        "window_id": entry.window_id,
    }


def _status_json(status: SuperforecasterStatus) -> dict:
    return {
        "user_id": status.user_id,
        "consecutive_top_windows": status.consecutive_top_windows,
        "flagged": status.flagged,
    }


def _forecast_json(forecast: AugmentedForecast) -> dict:
    return {
        "symbol": forecast.symbol,
        "target_date": forecast.target_date.isoformat(),
        "ml_value": _price_str(forecast.ml_value),
        "human_consensus": _price_str(forecast.human_consensus),
        "weight": forecast.weight,
        "combined": _price_str(forecast.combined),
    }


def create_app(
    service: OracleService,
    *,
    admin_token: str,
    ml_provider: MlProvider | None = None,
    now: Callable[[], datetime] | None = None,
) -> FastAPI:
    app = FastAPI(title="stockbench oracle", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.service = service

    def bearer(request: Request) -> str:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise UnknownUserError("missing bearer token")
        return header[7:].strip()

    @app.exception_handler(ValidationError)
    async def _validation(_, exc):
        return JSONResponse(status_code=400, content={"code": "validation", "message": str(exc)})

    @app.exception_handler(UnknownUserError)
    async def _auth(_, exc):
        return JSONResponse(status_code=401, content={"code": "unauthorized", "message": str(exc)})

    @app.exception_handler(ConflictError)
    async def _conflict(_, exc):
        return JSONResponse(status_code=409, content={"code": "conflict", "message": str(exc)})

    @app.post("/users", status_code=201)
    def register(body: RegisterBody):
        user = service.register_user(body.handle, now() if now else None)
        return {"id": user.id, "handle": user.handle, "token": user.token}

    @app.post("/predictions", status_code=201)
    def submit(body: PredictionBody, token: str = Depends(bearer)):
        user = service.authenticate(token)
        record = service.submit_prediction(
            user.id,
            body.symbol,
            _date(body.target_date, "target_date"),
            _price(body.predicted_price, "predicted_price"),
            now() if now else None,
        )
        return _record_json(record)

    @app.post("/resolutions")
    def resolve(body: ResolutionBody, token: str = Depends(bearer)):
        if token != admin_token:
            raise UnknownUserError("admin token required")
        count = service.resolve_predictions(
            body.symbol, _date(body.date, "date"), _price(body.actual_price, "actual_price")
        )
        return {"resolved_count": count}

    @app.get("/leaderboard")
    def leaderboard(request: Request):
        params = request.query_params
        window_from = _date(params["from"], "from") if "from" in params else None
        window_to = _date(params["to"], "to") if "to" in params else None
        min_resolved = None
        if "min_resolved" in params:
            try:
                min_resolved = int(params["min_resolved"])
            except ValueError:
                raise ValidationError("min_resolved must be an integer") from None
        entries = service.compute_leaderboard(window_from, window_to, min_resolved)
        return [_entry_json(e) for e in entries]

    @app.get("/superforecasters")
    def superforecasters():
        return [_status_json(s) for s in service.superforecasters()]

    @app.get("/forecast/{symbol}")
    def forecast(symbol: str, target_date: str, weight: float = 0.5):
        when = _date(target_date, "target_date")
        ml_value = ml_provider(symbol, when) if ml_provider else None
        result = service.augmented_forecast(symbol, when, ml_value, weight)
        return _forecast_json(result)

    return app

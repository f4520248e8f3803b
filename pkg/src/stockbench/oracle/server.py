"""Run the oracle API under uvicorn.

    oracle-server --store events.ndjson --admin-token SECRET \
        --bundle bench_out/bundle_GRU.json --port 8000 [--static frontend/dist]

Each --bundle wires a trained model (written by ``bench run --save-bundles``
or ``bench forecast --save-bundle``) as the ML leg for its symbol; symbols
with no bundle degrade to humans-only forecasts.
"""

from __future__ import annotations

import argparse
import secrets
import sys
from datetime import date as CalendarDate
from pathlib import Path

import uvicorn

from ..bench import ForecastBundle, load_bundle
from .api import create_app
from .core import OracleService
from .store import EventStore


def bundle_provider(bundles: list[ForecastBundle]):
    """ML provider backed by per-symbol forecast bundles."""
    by_symbol = {b.symbol.upper(): b for b in bundles}

    def provider(symbol: str, target: CalendarDate) -> float | None:
        bundle = by_symbol.get(symbol.upper())
        if bundle is None:
            return None
        return bundle.forecast_for_date(target)

    return provider


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oracle-server", description=__doc__.splitlines()[0])
    parser.add_argument("--store", type=Path, default=Path("oracle_events.ndjson"))
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--admin-token", help="bearer token for /resolutions (generated if omitted)")
    parser.add_argument(
        "--bundle", type=Path, action="append", default=[], help="forecast bundle JSON (repeatable)"
    )
    parser.add_argument("--static", type=Path, help="serve this directory at / (the web client)")
    parser.add_argument("--min-resolved", type=int, default=3)
    parser.add_argument("--top-fraction", type=float, default=0.1)
    parser.add_argument("--min-consecutive", type=int, default=3)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    admin_token = args.admin_token or secrets.token_hex(16)
    if not args.admin_token:
        print(f"generated admin token: {admin_token}", file=sys.stderr)

    service = OracleService(
        EventStore(args.store),
        min_resolved=args.min_resolved,
        top_fraction=args.top_fraction,
        min_consecutive=args.min_consecutive,
    )
    provider = bundle_provider([load_bundle(p) for p in args.bundle]) if args.bundle else None
    app = create_app(service, admin_token=admin_token, ml_provider=provider)
    if args.static:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=args.static, html=True), name="static")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())

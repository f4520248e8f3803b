"""The ``bench`` command line: run benchmarks, forecast ahead, generate data.

    bench run --data prices.csv --out results/
    bench run --config bench.cfg --models BiLSTM,ARIMA --seed 7
    bench forecast --model GRU --horizon 5 --data prices.csv
    bench synth --out prices.csv --kind sine --points 500

Config files are flat ``key = value`` text; command-line flags win over file
values.  Exit code is 0 on success and 1 with a stderr diagnostic otherwise.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import (
    BenchConfig,
    export_predictions,
    forecast_prices,
    load_bundle,
    parse_config_file,
    run_benchmark,
    save_bundle,
    train_bundle,
)
from .synth import random_walk_series, sine_series, write_csv
from .zoo import TABLE_ORDER


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="train the selected models and write the score report")
    _add_config_flags(run)
    run.add_argument("--save-bundles", action="store_true", help="also write bundle_<model>.json")

    fc = sub.add_parser("forecast", help="print future prices for one model")
    fc.add_argument("--model", required=True, choices=TABLE_ORDER)
    fc.add_argument("--horizon", type=int, required=True, help="steps ahead (>= 1)")
    fc.add_argument("--bundle", type=Path, help="forecast from a saved bundle instead of training")
    fc.add_argument("--no-train", action="store_true", help="fail instead of training when no bundle is given")
    fc.add_argument("--save-bundle", type=Path, help="write the trained bundle here")
    _add_config_flags(fc)

    synth = sub.add_parser("synth", help="write a synthetic price CSV")
    synth.add_argument("--out", type=Path, required=True)
    synth.add_argument("--kind", choices=("sine", "walk"), default="sine")
    synth.add_argument("--points", type=int, default=500)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--noise", type=float, default=0.0, help="sine only: noise std dev")
    return parser


def _add_config_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, help="flat key = value config file")
    sub.add_argument("--data", type=Path, help="price CSV (columns date, close)")
    sub.add_argument("--out", type=Path, help="output directory")
    sub.add_argument("--models", help="comma-separated subset of the five model names")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--epochs", type=int)
    sub.add_argument("--time-step", type=int, dest="time_step")
    sub.add_argument("--train-fraction", type=float, dest="train_fraction")
    sub.add_argument("--no-plots", action="store_true", help="skip figure rendering")


def _config_from_args(args: argparse.Namespace) -> BenchConfig:
    values: dict = {}
    if args.config:
        values.update(parse_config_file(args.config))
    if args.data:
        values["data_path"] = args.data
    if args.out:
        values["output_dir"] = args.out
    if args.models:
        values["models"] = tuple(m.strip() for m in args.models.split(",") if m.strip())
    for key in ("seed", "epochs", "time_step", "train_fraction"):
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    if args.no_plots:
        values["plots"] = False
    if "data_path" not in values:
        raise ValueError("no input data: pass --data or set data_path in the config file")
    return BenchConfig(**values)


def _cmd_run(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    result = run_benchmark(config)
    for name, message in result.table.failures:
        print(f"warning: {name} failed: {message}", file=sys.stderr)
    if not result.runs:
        print("error: every selected model failed", file=sys.stderr)
        return 1
    written = export_predictions(result)
    if config.plots:
        from .plots import render_benchmark_figures

        written.extend(render_benchmark_figures(result))
    if args.save_bundles:
        from .bench import bundle_from_run

        for name in result.runs:
            written.append(
                save_bundle(bundle_from_run(result, name), config.output_dir / f"bundle_{name}.json")
            )

    header = f"{'model':<10} {'train_rmse':>12} {'test_rmse':>12} {'train_mae':>12} {'test_mae':>12} {'seconds':>9}"
    print(header)
    for row in result.table.rows:
        print(
            f"{row.name:<10} {row.train_rmse:>12.4f} {row.test_rmse:>12.4f} "
            f"{row.train_mae:>12.4f} {row.test_mae:>12.4f} {row.train_seconds:>9.2f}"
        )
    print(f"naive last-value test MAE: {result.naive_test_mae:.4f}")
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_forecast(args: argparse.Namespace) -> int:
    if args.horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {args.horizon}")
    if args.bundle:
        bundle = load_bundle(args.bundle)
        if bundle.model_name != args.model:
            raise ValueError(f"bundle holds {bundle.model_name}, not {args.model}")
        values = bundle.forecast(args.horizon)
    elif args.no_train:
        raise ValueError("--no-train given but no --bundle to load")
    else:
        config = _config_from_args(args)
        if args.save_bundle:
            bundle = train_bundle(config, args.model)
            save_bundle(bundle, args.save_bundle)
            print(f"wrote {args.save_bundle}", file=sys.stderr)
            values = bundle.forecast(args.horizon)
        else:
            values = forecast_prices(config, args.model, args.horizon)
    for step, value in enumerate(values, 1):
        print(f"{step}\t{value:.6f}")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    if args.kind == "sine":
        series = sine_series(args.points, noise=args.noise, seed=args.seed)
    else:
        series = random_walk_series(args.points, seed=args.seed)
    write_csv(series, args.out)
    print(f"wrote {args.out} ({args.points} points, kind={args.kind})")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "forecast": _cmd_forecast, "synth": _cmd_synth}
    try:
        return handlers[args.command](args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

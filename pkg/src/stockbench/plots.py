"""Render benchmark figures next to the delimited output.

One predicted-vs-actual figure per model plus a score summary chart, all
drawn from the same arrays that back the CSV exports.  Uses the Agg backend
so it works headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .bench import BenchResult

__all__ = ["render_run_figure", "render_score_figure", "render_benchmark_figures"]

_TRAIN_COLOR = "#7f7f7f"
_ACTUAL_COLOR = "#1f77b4"
_PRED_COLOR = "#d62728"


def render_run_figure(result: BenchResult, name: str, output_dir: Path) -> Path:
    """Actual vs predicted over the full timeline, test split highlighted."""
    run = result.runs[name]
    fig, ax = plt.subplots(figsize=(10, 4.5))
    ax.plot(run.train_dates, run.train_actual, color=_TRAIN_COLOR, lw=1.0, label="actual (train)")
    ax.plot(run.train_dates, run.train_pred, color=_PRED_COLOR, lw=0.8, alpha=0.55)
    ax.plot(run.test_dates, run.test_actual, color=_ACTUAL_COLOR, lw=1.2, label="actual (test)")
    ax.plot(run.test_dates, run.test_pred, color=_PRED_COLOR, lw=1.2, label="predicted")
    ax.axvline(run.test_dates[0], color="black", lw=0.8, ls="--")
    ax.set_title(
        f"{name} on {result.series.symbol}  "
        f"(test MAE {run.test_report.mae:.4g}, RMSE {run.test_report.rmse:.4g})"
    )
    ax.set_ylabel("close")
    ax.legend(loc="best", fontsize=8)
    fig.autofmt_xdate()
    fig.tight_layout()
    path = output_dir / f"fig_{name}.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_score_figure(result: BenchResult, output_dir: Path) -> Path:
    """Grouped bars of train/test MAE per model."""
    rows = result.table.rows
    fig, ax = plt.subplots(figsize=(7, 4))
    xs = range(len(rows))
    width = 0.38
    ax.bar([x - width / 2 for x in xs], [r.train_mae for r in rows], width, label="train MAE")
    ax.bar([x + width / 2 for x in xs], [r.test_mae for r in rows], width, label="test MAE")
    ax.axhline(result.naive_test_mae, color="black", lw=0.9, ls=":", label="naive baseline (test)")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([r.name for r in rows], rotation=20)
    ax.set_ylabel("MAE (price units)")
    ax.set_title(f"Model scores on {result.series.symbol}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = output_dir / "fig_scores.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_benchmark_figures(result: BenchResult, output_dir: str | Path | None = None) -> list[Path]:
    """All figures for a finished run; returns the written paths."""
    output_dir = Path(output_dir) if output_dir is not None else result.config.output_dir
    output_dir.mkdir(parents=True, exist_ok=True)
    paths = [render_run_figure(result, name, output_dir) for name in result.runs]
    if result.table.rows:
        paths.append(render_score_figure(result, output_dir))
    return paths

/**
 * Pure render functions: state in, HTML string out.
 *
 * Nothing here computes rankings, errors, or combined values; every number
 * shown is a server-provided value rendered verbatim (single source of
 * truth), which also makes these functions trivially testable.
 */

import type {
  ForecastView,
  LeaderboardRow,
  PredictionReceipt,
  SuperforecasterStatus,
} from "./api.js";

export function escapeHtml(value: string): string {
  return value
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function renderLeaderboard(
  rows: LeaderboardRow[],
  statuses: SuperforecasterStatus[],
): string {
  if (rows.length === 0) {
    return `<p class="empty">No ranked forecasters yet. Rankings appear once predictions resolve.</p>`;
  }
  const flagged = new Set(statuses.filter((s) => s.flagged).map((s) => s.user_id));
  const body = rows
    .map((row) => {
      const badge = flagged.has(row.user_id)
        ? ` <span class="badge" title="superforecaster">★</span>`
        : "";
      const pct = (Number(row.mean_pct_error) * 100).toFixed(3);
      return (
        `<tr><td>${row.rank}</td>` +
        `<td>${escapeHtml(row.handle)}${badge}</td>` +
        `<td>${row.resolved_count}</td>` +
        `<td>${pct}%</td></tr>`
      );
    })
    .join("");
  return (
    `<table class="board"><thead>` +
    `<tr><th>rank</th><th>forecaster</th><th>resolved</th><th>mean error</th></tr>` +
    `</thead><tbody>${body}</tbody></table>`
  );
}

export function renderConfirmation(receipt: PredictionReceipt): string {
  return (
    `<p class="confirmation">Recorded: <strong>${escapeHtml(receipt.symbol)}</strong> at ` +
    `<strong>${escapeHtml(receipt.predicted_price)}</strong> for ` +
    `${escapeHtml(receipt.target_date)} (status ${escapeHtml(receipt.status)}).</p>`
  );
}

export function renderError(message: string): string {
  return `<p class="error">${escapeHtml(message)}</p>`;
}

export function renderFieldErrors(errors: Record<string, string>): string {
  const items = Object.entries(errors)
    .map(([field, message]) => `<li><strong>${escapeHtml(field)}</strong>: ${escapeHtml(message)}</li>`)
    .join("");
  return `<ul class="field-errors">${items}</ul>`;
}

export function renderForecast(view: ForecastView): string {
  const rows: string[] = [];
  if (view.ml_value !== null) {
    rows.push(`<dt>model</dt><dd>${escapeHtml(view.ml_value)}</dd>`);
  }
  if (view.human_consensus !== null) {
    rows.push(`<dt>human consensus</dt><dd>${escapeHtml(view.human_consensus)}</dd>`);
  }
  rows.push(`<dt>weight</dt><dd>${view.weight}</dd>`);
  rows.push(`<dt>combined</dt><dd class="combined">${escapeHtml(view.combined ?? "")}</dd>`);
  let label = "";
  if (view.human_consensus === null) {
    label = `<p class="note">ML only: no open human predictions for this date.</p>`;
  } else if (view.ml_value === null) {
    label = `<p class="note">Humans only: no model is configured for this symbol.</p>`;
  }
  return `<dl class="forecast">${rows.join("")}</dl>${label}`;
}

export interface ChartPoint {
  date: string;
  value: number;
}

/** Inline SVG line chart of recent actuals with the forecast point marked. */
export function renderChart(
  actuals: ChartPoint[],
  forecast: { date: string; value: number } | null,
  width = 640,
  height = 180,
): string {
  const points = [...actuals];
  if (forecast) points.push({ date: forecast.date, value: forecast.value });
  if (points.length < 2) {
    return `<p class="empty">Not enough data to chart.</p>`;
  }
  const values = points.map((p) => p.value);
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || 1;
  const pad = 8;
  const x = (i: number) => pad + (i * (width - 2 * pad)) / (points.length - 1);
  const y = (v: number) => height - pad - ((v - lo) * (height - 2 * pad)) / span;
  const path = actuals.map((p, i) => `${x(i).toFixed(1)},${y(p.value).toFixed(1)}`).join(" ");
  let marker = "";
  if (forecast) {
    const fx = x(points.length - 1).toFixed(1);
    const fy = y(forecast.value).toFixed(1);
    marker = `<circle cx="${fx}" cy="${fy}" r="4" class="forecast-dot"/>`;
  }
  return (
    `<svg viewBox="0 0 ${width} ${height}" role="img" aria-label="recent closes">` +
    `<polyline points="${path}" fill="none" class="actuals"/>` +
    marker +
    `</svg>`
  );
}

/** Parse an exported prediction CSV (date,split,actual,predicted) into chart
 * points, keeping the trailing test-split actuals. */
export function parsePredictionCsv(text: string, keep = 60): ChartPoint[] {
  const lines = text.trim().split(/\r?\n/);
  const header = lines[0]?.split(",") ?? [];
  const dateCol = header.indexOf("date");
  const actualCol = header.indexOf("actual");
  if (dateCol < 0 || actualCol < 0) return [];
  const points: ChartPoint[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    const date = cells[dateCol];
    const actual = Number(cells[actualCol]);
    if (date && Number.isFinite(actual)) {
      points.push({ date, value: actual });
    }
  }
  return points.slice(-keep);
}

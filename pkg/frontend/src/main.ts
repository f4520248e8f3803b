/**
 * DOM wiring: the only module that touches `document`.
 *
 * The API base defaults to the serving origin and can be overridden with
 * ?api=http://host:port for development against a separate server.
 */

import { ApiError, OracleClient } from "./api.js";
import {
  ForecastController,
  LeaderboardController,
  SubmitController,
} from "./controller.js";
import { MemoryStorage, SessionStore } from "./state.js";
import {
  parsePredictionCsv,
  renderChart,
  renderConfirmation,
  renderError,
  renderFieldErrors,
  renderForecast,
  renderLeaderboard,
} from "./views.js";

function apiBase(): string {
  const override = new URLSearchParams(window.location.search).get("api");
  return override ?? window.location.origin;
}

function storage() {
  try {
    window.localStorage.setItem("stockbench.probe", "1");
    window.localStorage.removeItem("stockbench.probe");
    return window.localStorage;
  } catch {
    return new MemoryStorage();
  }
}

const client = new OracleClient(apiBase());
const sessions = new SessionStore(storage());
const submitController = new SubmitController(client, sessions, () =>
  new Date().toISOString().slice(0, 10),
);
const boardController = new LeaderboardController(client);
const forecastController = new ForecastController(client);

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

function refreshSessionBox(): void {
  const session = sessions.session;
  $("session-state").innerHTML = session
    ? `signed in as <strong>${session.handle}</strong> <button id="logout">log out</button>`
    : `<form id="register-form"><input id="handle" placeholder="pick a handle" maxlength="64">` +
      `<button type="submit">register</button></form><div id="register-out"></div>`;
  const logout = document.getElementById("logout");
  if (logout) {
    logout.addEventListener("click", () => {
      sessions.clear();
      refreshSessionBox();
    });
  }
  const form = document.getElementById("register-form");
  if (form) {
    form.addEventListener("submit", async (event) => {
      event.preventDefault();
      const handle = ($("handle") as HTMLInputElement).value;
      try {
        sessions.save(await client.register(handle));
        refreshSessionBox();
      } catch (error) {
        $("register-out").innerHTML = renderError(
          error instanceof ApiError ? error.message : "registration failed",
        );
      }
    });
  }
}

async function refreshLeaderboard(): Promise<void> {
  const from = ($("board-from") as HTMLInputElement).value || undefined;
  const to = ($("board-to") as HTMLInputElement).value || undefined;
  try {
    const state = await boardController.load({ from, to });
    $("board-out").innerHTML = renderLeaderboard(state.rows, state.statuses);
  } catch (error) {
    $("board-out").innerHTML = renderError(
      error instanceof ApiError ? error.message : "could not load the leaderboard",
    );
  }
}

async function refreshForecast(): Promise<void> {
  const symbol = ($("fc-symbol") as HTMLInputElement).value.trim();
  const targetDate = ($("fc-date") as HTMLInputElement).value;
  const weight = Number(($("fc-weight") as HTMLInputElement).value);
  $("fc-weight-label").textContent = weight.toFixed(2);
  if (!symbol || !targetDate) return;
  try {
    const view = await forecastController.load(symbol, targetDate, weight);
    if (view) {
      $("fc-out").innerHTML = renderForecast(view);
      await drawChart(symbol, view.target_date, view.combined);
    }
  } catch (error) {
    $("fc-out").innerHTML = renderError(
      error instanceof ApiError ? error.message : "could not load the forecast",
    );
  }
}

async function drawChart(symbol: string, date: string, combined: string | null): Promise<void> {
  // recent actuals come from benchmark exports served statically, when present
  for (const name of ["GRU", "BiLSTM", "ARIMA", "CNN_LSTM", "LSTM_GRU"]) {
    try {
      const response = await fetch(`${apiBase()}/exports/pred_${name}.csv`);
      if (!response.ok) continue;
      const points = parsePredictionCsv(await response.text());
      const forecast = combined !== null ? { date, value: Number(combined) } : null;
      $("fc-chart").innerHTML = renderChart(points, forecast);
      return;
    } catch {
      // fall through: chart is optional decoration
    }
  }
  $("fc-chart").innerHTML = "";
}

function wireSubmitForm(): void {
  $("predict-form").addEventListener("submit", async (event) => {
    event.preventDefault();
    const result = await submitController.submit({
      symbol: ($("p-symbol") as HTMLInputElement).value,
      targetDate: ($("p-date") as HTMLInputElement).value,
      predictedPrice: ($("p-price") as HTMLInputElement).value,
    });
    if (result.ok) {
      $("predict-out").innerHTML = renderConfirmation(result.receipt);
      void refreshLeaderboard();
    } else if (result.needsRegistration) {
      refreshSessionBox();
      $("predict-out").innerHTML = renderError("register a handle first, then resubmit");
    } else {
      $("predict-out").innerHTML =
        renderFieldErrors(result.fieldErrors) +
        (result.retryable ? `<button id="retry">retry</button>` : "");
      document.getElementById("retry")?.addEventListener("click", () => {
        ($("predict-form") as HTMLFormElement).requestSubmit();
      });
    }
  });
}

refreshSessionBox();
wireSubmitForm();
$("board-refresh").addEventListener("click", () => void refreshLeaderboard());
$("board-from").addEventListener("change", () => void refreshLeaderboard());
$("board-to").addEventListener("change", () => void refreshLeaderboard());
$("fc-form").addEventListener("submit", (event) => {
  event.preventDefault();
  void refreshForecast();
});
$("fc-weight").addEventListener("input", () => void refreshForecast());
void refreshLeaderboard();

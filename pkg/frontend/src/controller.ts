/**
 * Page flows between the API client and the views.
 *
 * Client-side guards mirror the server's preconditions (future target date,
 * positive price) so obviously bad forms never produce a request; every
 * server rejection surfaces its message verbatim.  In-flight requests are
 * deduplicated per view so a slider drag cannot interleave stale responses.
 */

import {
  ApiError,
  NetworkError,
  OracleClient,
  type ForecastView,
  type LeaderboardRow,
  type PredictionReceipt,
  type SuperforecasterStatus,
} from "./api.js";
import type { SessionStore } from "./state.js";

export interface SubmitForm {
  symbol: string;
  targetDate: string;
  predictedPrice: string;
}

export type SubmitResult =
  | { ok: true; receipt: PredictionReceipt }
  | { ok: false; fieldErrors: Record<string, string>; needsRegistration?: boolean; retryable?: boolean };

export function validateSubmitForm(form: SubmitForm, today: string): Record<string, string> {
  const errors: Record<string, string> = {};
  if (!form.symbol.trim()) {
    errors.symbol = "enter a symbol";
  }
  if (!form.targetDate) {
    errors.target_date = "pick a target date";
  } else if (form.targetDate <= today) {
    errors.target_date = "target date must be after today";
  }
  const price = Number(form.predictedPrice);
  if (!form.predictedPrice.trim() || !Number.isFinite(price) || price <= 0) {
    errors.predicted_price = "enter a positive price";
  }
  return errors;
}

export class SubmitController {
  constructor(
    private readonly client: OracleClient,
    private readonly sessions: SessionStore,
    private readonly today: () => string,
  ) {}

  async submit(form: SubmitForm): Promise<SubmitResult> {
    const session = this.sessions.session;
    if (!session) {
      return { ok: false, fieldErrors: {}, needsRegistration: true };
    }
    const fieldErrors = validateSubmitForm(form, this.today());
    if (Object.keys(fieldErrors).length > 0) {
      return { ok: false, fieldErrors };
    }
    try {
      const receipt = await this.client.submitPrediction(session.token, {
        symbol: form.symbol.trim(),
        targetDate: form.targetDate,
        predictedPrice: form.predictedPrice.trim(),
      });
      return { ok: true, receipt };
    } catch (error) {
      if (error instanceof ApiError && error.status === 401) {
        this.sessions.clear();
        return { ok: false, fieldErrors: { session: error.message }, needsRegistration: true };
      }
      if (error instanceof ApiError) {
        return { ok: false, fieldErrors: { server: error.message } };
      }
      if (error instanceof NetworkError) {
        return { ok: false, fieldErrors: { network: error.message }, retryable: true };
      }
      throw error;
    }
  }
}

export interface BoardState {
  rows: LeaderboardRow[];
  statuses: SuperforecasterStatus[];
}

export class LeaderboardController {
  private inFlight: Promise<BoardState> | null = null;

  constructor(private readonly client: OracleClient) {}

  /** Concurrent calls share one request; a window change starts a fresh one. */
  load(window: { from?: string; to?: string; minResolved?: number } = {}): Promise<BoardState> {
    if (!this.inFlight) {
      this.inFlight = (async () => {
        try {
          const [rows, statuses] = await Promise.all([
            this.client.leaderboard(window),
            this.client.superforecasters(),
          ]);
          return { rows, statuses };
        } finally {
          this.inFlight = null;
        }
      })();
    }
    return this.inFlight;
  }
}

export class ForecastController {
  private latest = 0;

  constructor(private readonly client: OracleClient) {}

  /** Refetch on every weight change; stale responses are dropped. */
  async load(symbol: string, targetDate: string, weight: number): Promise<ForecastView | null> {
    const ticket = ++this.latest;
    const view = await this.client.forecast(symbol, targetDate, weight);
    return ticket === this.latest ? view : null;
  }
}

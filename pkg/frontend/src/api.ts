/**
 * Typed client for the oracle HTTP API.
 *
 * Prices travel as decimal strings end to end; this client never converts
 * them to numbers except for display, so server values render verbatim.
 * Errors surface as ApiError carrying the server's {code, message} body.
 */

export interface Session {
  id: string;
  handle: string;
  token: string;
}

export interface PredictionReceipt {
  id: string;
  user_id: string;
  symbol: string;
  target_date: string;
  predicted_price: string;
  submitted_at: string;
  status: string;
}

export interface LeaderboardRow {
  user_id: string;
  handle: string;
  resolved_count: number;
  mean_pct_error: string;
  rank: number;
  window_id: string;
}

export interface SuperforecasterStatus {
  user_id: string;
  consecutive_top_windows: number;
  flagged: boolean;
}

export interface ForecastView {
  symbol: string;
  target_date: string;
  ml_value: string | null;
  human_consensus: string | null;
  weight: number;
  combined: string | null;
}

export interface LeaderboardQuery {
  from?: string;
  to?: string;
  minResolved?: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class NetworkError extends Error {
  constructor(readonly reason: unknown) {
    super("network failure; the server may be unreachable");
    this.name = "NetworkError";
  }
}

type FetchLike = typeof fetch;

export class OracleClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(
    path: string,
    init: RequestInit = {},
    token?: string,
  ): Promise<T> {
    const headers: Record<string, string> = {
      ...(init.body ? { "Content-Type": "application/json" } : {}),
      ...(token ? { Authorization: `Bearer ${token}` } : {}),
    };
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, { ...init, headers });
    } catch (cause) {
      throw new NetworkError(cause);
    }
    const text = await response.text();
    const body = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const code = body?.code ?? "error";
      const message = body?.message ?? `request failed with status ${response.status}`;
      throw new ApiError(response.status, code, message);
    }
    return body as T;
  }

  register(handle: string): Promise<Session> {
    return this.request<Session>("/users", {
      method: "POST",
      body: JSON.stringify({ handle }),
    });
  }

  submitPrediction(
    token: string,
    input: { symbol: string; targetDate: string; predictedPrice: string },
  ): Promise<PredictionReceipt> {
    return this.request<PredictionReceipt>(
      "/predictions",
      {
        method: "POST",
        body: JSON.stringify({
          symbol: input.symbol,
          target_date: input.targetDate,
          predicted_price: input.predictedPrice,
        }),
      },
      token,
    );
  }

  resolve(
    adminToken: string,
    input: { symbol: string; date: string; actualPrice: string },
  ): Promise<{ resolved_count: number }> {
    return this.request(
      "/resolutions",
      {
        method: "POST",
        body: JSON.stringify({
          symbol: input.symbol,
          date: input.date,
          actual_price: input.actualPrice,
        }),
      },
      adminToken,
    );
  }

  leaderboard(query: LeaderboardQuery = {}): Promise<LeaderboardRow[]> {
    const params = new URLSearchParams();
    if (query.from) params.set("from", query.from);
    if (query.to) params.set("to", query.to);
    if (query.minResolved !== undefined) params.set("min_resolved", String(query.minResolved));
    const suffix = params.size ? `?${params.toString()}` : "";
    return this.request<LeaderboardRow[]>(`/leaderboard${suffix}`);
  }

  superforecasters(): Promise<SuperforecasterStatus[]> {
    return this.request<SuperforecasterStatus[]>("/superforecasters");
  }

  forecast(symbol: string, targetDate: string, weight: number): Promise<ForecastView> {
    const params = new URLSearchParams({ target_date: targetDate, weight: String(weight) });
    return this.request<ForecastView>(
      `/forecast/${encodeURIComponent(symbol)}?${params.toString()}`,
    );
  }
}

import { describe, expect, it } from "vitest";

import type { ForecastView, LeaderboardRow, SuperforecasterStatus } from "../src/api.js";
import {
  escapeHtml,
  parsePredictionCsv,
  renderChart,
  renderConfirmation,
  renderForecast,
  renderLeaderboard,
} from "../src/views.js";

function row(partial: Partial<LeaderboardRow>): LeaderboardRow {
  return {
    user_id: "u1",
    handle: "alice",
    resolved_count: 3,
    mean_pct_error: "0.0125",
    rank: 1,
    window_id: "*..*",
    ...partial,
  };
}

describe("renderLeaderboard", () => {
  it("renders one row per entry with ranks exactly as received", () => {
    const rows = [
      row({ user_id: "u1", handle: "a", rank: 1 }),
      row({ user_id: "u2", handle: "b", rank: 2 }),
      row({ user_id: "u3", handle: "c", rank: 3 }),
    ];
    const html = renderLeaderboard(rows, []);
    expect(html.match(/<tr>/g)).toHaveLength(4); // header + 3 body rows
    expect(html).toContain("<td>1</td>");
    expect(html).toContain("<td>2</td>");
    expect(html).toContain("<td>3</td>");
  });

  it("renders tied competition ranks verbatim without re-ranking", () => {
    const rows = [
      row({ user_id: "u1", handle: "a", rank: 1 }),
      row({ user_id: "u2", handle: "b", rank: 1 }),
      row({ user_id: "u3", handle: "c", rank: 3 }),
    ];
    const html = renderLeaderboard(rows, []);
    const ranks = [...html.matchAll(/<tr><td>(\d+)<\/td>/g)].map((m) => m[1]);
    expect(ranks).toEqual(["1", "1", "3"]);
    expect(html).not.toContain("<td>2</td>");
  });

  it("shows an explanatory empty state for an empty board", () => {
    const html = renderLeaderboard([], []);
    expect(html).toContain("class=\"empty\"");
    expect(html).toContain("No ranked forecasters yet");
  });

  it("badges flagged superforecasters only", () => {
    const statuses: SuperforecasterStatus[] = [
      { user_id: "u1", consecutive_top_windows: 4, flagged: true },
      { user_id: "u2", consecutive_top_windows: 1, flagged: false },
    ];
    const html = renderLeaderboard(
      [row({ user_id: "u1", handle: "a" }), row({ user_id: "u2", handle: "b", rank: 2 })],
      statuses,
    );
    const [aRow, bRow] = html.split("</tr>").filter((part) => part.includes("<td>"));
    expect(aRow).toContain("badge");
    expect(bRow).not.toContain("badge");
  });

  it("escapes handles", () => {
    const html = renderLeaderboard([row({ handle: "<img>" })], []);
    expect(html).toContain("&lt;img&gt;");
    expect(html).not.toContain("<img>");
  });
});

describe("renderConfirmation", () => {
  it("echoes the server's stored price string verbatim", () => {
    const html = renderConfirmation({
      id: "p1",
      user_id: "u1",
      symbol: "NIFTY",
      target_date: "2026-08-10",
      predicted_price: "17350.25",
      submitted_at: "2026-08-01T10:00:00+00:00",
      status: "open",
    });
    expect(html).toContain("17350.25");
    expect(html).toContain("NIFTY");
    expect(html).toContain("2026-08-10");
  });
});

describe("renderForecast", () => {
  const base: ForecastView = {
    symbol: "NIFTY",
    target_date: "2026-08-10",
    ml_value: "100.0",
    human_consensus: "110.0",
    weight: 0.5,
    combined: "105.0",
  };

  it("displays the server-computed combined value verbatim", () => {
    const html = renderForecast(base);
    expect(html).toContain(">105.0</dd>");
    expect(html).toContain("100.0");
    expect(html).toContain("110.0");
  });

  it("at weight 1 renders combined equal to the ml value", () => {
    const html = renderForecast({ ...base, weight: 1, combined: "100.0" });
    expect(html).toContain(">100.0</dd>");
  });

  it("labels ML only when no human predictions exist", () => {
    const html = renderForecast({ ...base, human_consensus: null, weight: 1, combined: "100.0" });
    expect(html).toContain("ML only");
  });

  it("labels humans only when no model is configured", () => {
    const html = renderForecast({ ...base, ml_value: null, weight: 0, combined: "110.0" });
    expect(html).toContain("Humans only");
  });
});

describe("renderChart", () => {
  it("draws a polyline through the actuals and marks the forecast", () => {
    const html = renderChart(
      [
        { date: "2026-08-01", value: 100 },
        { date: "2026-08-02", value: 102 },
        { date: "2026-08-03", value: 101 },
      ],
      { date: "2026-08-05", value: 104 },
    );
    expect(html).toContain("<polyline");
    expect(html).toContain("forecast-dot");
  });

  it("degrades gracefully with too little data", () => {
    expect(renderChart([], null)).toContain("Not enough data");
  });
});

describe("parsePredictionCsv", () => {
  it("reads date/actual pairs from an exported prediction file", () => {
    const text =
      "date,split,actual,predicted\n" +
      "2026-08-01,train,100.5,100.1\n" +
      "2026-08-02,test,101.5,101.2\n";
    expect(parsePredictionCsv(text)).toEqual([
      { date: "2026-08-01", value: 100.5 },
      { date: "2026-08-02", value: 101.5 },
    ]);
  });

  it("returns nothing for files without the expected header", () => {
    expect(parsePredictionCsv("a,b\n1,2\n")).toEqual([]);
  });
});

describe("escapeHtml", () => {
  it("escapes the five specials", () => {
    expect(escapeHtml(`<a href="x">&'</a>`)).toBe(
      "&lt;a href=&quot;x&quot;&gt;&amp;&#39;&lt;/a&gt;",
    );
  });
});

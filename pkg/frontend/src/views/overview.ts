/**
 * Dataset overview: headline crowd statistics plus the threshold sweep
 * curve. All numerals are fetched; the sweep polyline is a display
 * projection of the fetched (threshold, SE, SP) triples.
 */

import { rawAttr, formatMs, formatPercent, formatRatio } from "../format.js";
import { el, esc } from "../html.js";
import { RESPONSE_PALETTE, STATISTICS_PALETTE } from "../palette.js";
import type { OverviewPayload, SweepPoint } from "../types.js";

const CURVE_WIDTH = 420;
const CURVE_HEIGHT = 160;
const CURVE_PAD = 8;

function stat(label: string, attr: string, raw: number | null, text: string): string {
  return el(
    "div",
    { class: "stat", [`data-${attr}`]: rawAttr(raw) },
    el("span", { class: "stat-label" }, esc(label)),
    el("span", { class: "stat-value" }, esc(text)),
  );
}

function curvePoints(points: SweepPoint[], pickY: (p: SweepPoint) => number | null): string {
  const usableW = CURVE_WIDTH - 2 * CURVE_PAD;
  const usableH = CURVE_HEIGHT - 2 * CURVE_PAD;
  const coords: string[] = [];
  for (const point of points) {
    const y = pickY(point);
    if (y === null) continue;
    const px = CURVE_PAD + (point.threshold / 100) * usableW;
    const py = CURVE_PAD + (1 - y) * usableH;
    coords.push(`${px.toFixed(1)},${py.toFixed(1)}`);
  }
  return coords.join(" ");
}

function sweepCurve(payload: OverviewPayload): string {
  if (payload.sweep.length === 0) {
    return el("p", { class: "empty-state" }, esc("No sweep available."));
  }
  const sensitivity = el("polyline", {
    points: curvePoints(payload.sweep, (p) => p.sensitivity),
    class: "curve curve-sensitivity",
    fill: "none",
    stroke: RESPONSE_PALETTE.polyp,
  });
  const specificity = el("polyline", {
    points: curvePoints(payload.sweep, (p) => p.specificity),
    class: "curve curve-specificity",
    fill: "none",
    stroke: STATISTICS_PALETTE.correct,
  });
  return el(
    "figure",
    { class: "sweep" },
    el(
      "svg",
      {
        class: "sweep-plot",
        viewBox: `0 0 ${CURVE_WIDTH} ${CURVE_HEIGHT}`,
        width: CURVE_WIDTH,
        height: CURVE_HEIGHT,
      },
      sensitivity,
      specificity,
    ),
    el(
      "figcaption",
      {},
      esc(`sensitivity (red) and specificity (green) across thresholds, step ${payload.sweep_step}%`),
    ),
  );
}

/** Render the overview for one /overview payload. */
export function renderOverview(payload: OverviewPayload): string {
  const stats = el(
    "div",
    { class: "stats" },
    stat("workers", "n-workers", payload.n_workers, String(payload.n_workers)),
    stat("segments", "n-segments", payload.n_segments, String(payload.n_segments)),
    stat("responses", "n-responses", payload.n_responses, String(payload.n_responses)),
    stat("comments", "n-comments", payload.n_comments, String(payload.n_comments)),
    stat(
      "mean accuracy",
      "mean-accuracy",
      payload.mean_accuracy,
      formatPercent(payload.mean_accuracy),
    ),
    stat(
      "mean polyp answers",
      "mean-polyp-answers",
      payload.mean_polyp_answers,
      formatRatio(payload.mean_polyp_answers),
    ),
    stat(
      "mean false positives",
      "mean-false-positive",
      payload.mean_false_positive,
      formatRatio(payload.mean_false_positive),
    ),
    stat(
      "mean false negatives",
      "mean-false-negative",
      payload.mean_false_negative,
      formatRatio(payload.mean_false_negative),
    ),
    stat(
      "mean task time",
      "mean-total-time-ms",
      payload.mean_total_time_ms,
      formatMs(payload.mean_total_time_ms),
    ),
  );
  return el("section", { class: "overview" }, stats, sweepCurve(payload));
}

/**
 * Similarity view: a 2-D projection of workers or segments, one circle
 * glyph per item. Circle lightness and the arc around the rim are the
 * fetched glyph channels; the view only maps coordinates into the
 * viewport, it computes no statistic itself.
 */

import { rawAttr } from "../format.js";
import { el, esc } from "../html.js";
import type { ViewState } from "../state.js";
import type { EmbeddingPayload, EmbeddingPoint } from "../types.js";

const VIEW_SIZE = 640;
const VIEW_PAD = 28;
const GLYPH_RADIUS = 11;
const GLYPH_HUE = 210;
const GLYPH_SATURATION = 45;
const TWO_PI = Math.PI * 2;

interface Scale {
  x(value: number): number;
  y(value: number): number;
}

function makeScale(points: EmbeddingPoint[]): Scale {
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const minX = Math.min(...xs);
  const minY = Math.min(...ys);
  const spanX = Math.max(...xs) - minX || 1;
  const spanY = Math.max(...ys) - minY || 1;
  const extent = VIEW_SIZE - 2 * VIEW_PAD;
  return {
    x: (value) => VIEW_PAD + ((value - minX) / spanX) * extent,
    y: (value) => VIEW_PAD + ((value - minY) / spanY) * extent,
  };
}

/** SVG path for a clockwise rim arc spanning `fraction` of the circle. */
export function arcPath(cx: number, cy: number, r: number, fraction: number): string {
  const f = Math.min(1, Math.max(0, fraction));
  if (f === 0) return "";
  if (f === 1) {
    return (
      `M ${cx} ${cy - r} A ${r} ${r} 0 1 1 ${cx} ${cy + r}` +
      ` A ${r} ${r} 0 1 1 ${cx} ${cy - r}`
    );
  }
  const angle = TWO_PI * f - Math.PI / 2;
  const endX = cx + r * Math.cos(angle);
  const endY = cy + r * Math.sin(angle);
  const largeArc = f > 0.5 ? 1 : 0;
  return `M ${cx} ${cy - r} A ${r} ${r} 0 ${largeArc} 1 ${endX} ${endY}`;
}

function glyph(point: EmbeddingPoint, scale: Scale, items: string, selected: boolean): string {
  const cx = scale.x(point.x);
  const cy = scale.y(point.y);
  const fill = `hsl(${GLYPH_HUE}, ${GLYPH_SATURATION}%, ${(point.lightness * 100).toFixed(1)}%)`;
  const action = items === "workers" ? "select-worker" : "select-segment";
  const idAttr = items === "workers" ? "data-worker" : "data-segment";
  const circle = el("circle", {
    cx: cx.toFixed(1),
    cy: cy.toFixed(1),
    r: GLYPH_RADIUS,
    fill,
    class: selected ? "glyph-circle selected" : "glyph-circle",
    "data-action": action,
    [idAttr]: point.id,
    "data-id": point.id,
    "data-lightness": rawAttr(point.lightness),
    "data-arc-fraction": rawAttr(point.arc_fraction),
  });
  const arc = arcPath(cx, cy, GLYPH_RADIUS + 3, point.arc_fraction);
  const rim =
    arc === ""
      ? ""
      : el("path", { d: arc, class: "glyph-arc", fill: "none" });
  const label = el(
    "text",
    { x: cx.toFixed(1), y: (cy + GLYPH_RADIUS + 14).toFixed(1), class: "glyph-label" },
    esc(point.id),
  );
  return el("g", { class: "glyph" }, circle, rim, label);
}

function controls(payload: EmbeddingPayload, state: ViewState): string {
  const itemOptions = (["workers", "segments"] as const).map((items) =>
    el("option", { value: items, selected: items === state.items }, esc(items)),
  );
  const methodOptions = (["mds", "tsne"] as const).map((method) =>
    el("option", { value: method, selected: method === state.method }, esc(method)),
  );
  const glyphOptions = (["polyps", "accuracy"] as const).map((kind) =>
    el("option", { value: kind, selected: kind === state.glyph }, esc(kind)),
  );
  const weightBoxes = payload.available_axes.map((axis) =>
    el(
      "label",
      { class: "weight-axis" },
      el("input", {
        type: "checkbox",
        "data-action": "weight",
        "data-axis": axis,
        checked: state.weights.includes(axis),
      }),
      esc(axis.replaceAll("_", " ")),
    ),
  );
  return el(
    "header",
    { class: "embedding-controls" },
    el("label", {}, "items ", el("select", { "data-action": "items" }, itemOptions)),
    el("label", {}, "method ", el("select", { "data-action": "method" }, methodOptions)),
    el("label", {}, "arc glyph ", el("select", { "data-action": "glyph" }, glyphOptions)),
    el("fieldset", { class: "weights" }, el("legend", {}, "weight by"), weightBoxes),
  );
}

function qualityNote(payload: EmbeddingPayload): string {
  const parts: string[] = [];
  if (payload.stress !== undefined) parts.push(`stress ${payload.stress.toExponential(2)}`);
  if (payload.kl_divergence !== undefined) {
    parts.push(`KL ${payload.kl_divergence.toFixed(3)}`);
  }
  if (!payload.layout_converged) parts.push("layout did not fully converge");
  if (parts.length === 0) return "";
  return el("p", { class: "embedding-note" }, esc(parts.join(" · ")));
}

/** Render the similarity view for one /embedding payload. */
export function renderEmbedding(payload: EmbeddingPayload, state: ViewState): string {
  if (payload.points.length === 0) {
    return el(
      "section",
      { class: "embedding" },
      controls(payload, state),
      el("p", { class: "empty-state" }, esc("Nothing to project: no items remain.")),
    );
  }
  const scale = makeScale(payload.points);
  const selected = state.items === "workers" ? state.worker : state.segment;
  const glyphs = payload.points.map((point) =>
    glyph(point, scale, payload.items, point.id === selected),
  );
  const svg = el(
    "svg",
    {
      class: "embedding-plot",
      viewBox: `0 0 ${VIEW_SIZE} ${VIEW_SIZE}`,
      width: VIEW_SIZE,
      height: VIEW_SIZE,
    },
    glyphs,
  );
  return el("section", { class: "embedding" }, controls(payload, state), svg, qualityNote(payload));
}

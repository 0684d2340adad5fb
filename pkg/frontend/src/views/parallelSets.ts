/**
 * Parallel-sets view of crowd composition: one horizontal band per
 * demographic axis, ribbons cross-tabulating each adjacent pair.
 *
 * Band and ribbon extents are pure display geometry scaled from the
 * fetched counts; the only numerals printed are counts taken verbatim
 * from the payload (top-level node counts and per-ribbon counts).
 */

import { rawAttr } from "../format.js";
import { el, esc } from "../html.js";
import { RESERVED_CLASS_COLORS } from "../palette.js";
import type { ParallelSetsPayload, Ribbon } from "../types.js";

const PLOT_WIDTH = 720;
const BAND_HEIGHT = 26;
const RIBBON_HEIGHT = 110;
const CATEGORY_GAP = 6;

/** One category's horizontal slot on an axis band. */
export interface BandSegment {
  category: string;
  x0: number;
  x1: number;
  /** Fetched count when the payload states it directly, else null. */
  count: number | null;
}

/** One ribbon's trapezoid between adjacent bands. */
export interface RibbonShape {
  source: string;
  target: string;
  count: number;
  sx0: number;
  sx1: number;
  tx0: number;
  tx1: number;
}

export interface SetsLayout {
  bands: BandSegment[][];
  ribbons: RibbonShape[][];
}

function marginals(payload: ParallelSetsPayload, axisIndex: number): Map<string, number> {
  const totals = new Map<string, number>();
  if (axisIndex === 0) {
    for (const node of payload.nodes) totals.set(node.category, node.count);
    return totals;
  }
  for (const ribbon of payload.ribbons[axisIndex - 1]) {
    totals.set(ribbon.target, (totals.get(ribbon.target) ?? 0) + ribbon.count);
  }
  return totals;
}

function bandFor(
  totals: Map<string, number>,
  total: number,
  width: number,
  statedCounts: Map<string, number> | null,
): BandSegment[] {
  const gaps = Math.max(0, totals.size - 1) * CATEGORY_GAP;
  const usable = Math.max(1, width - gaps);
  const segments: BandSegment[] = [];
  let x = 0;
  for (const [category, count] of totals) {
    const extent = (count / total) * usable;
    segments.push({
      category,
      x0: x,
      x1: x + extent,
      count: statedCounts?.get(category) ?? null,
    });
    x += extent + CATEGORY_GAP;
  }
  return segments;
}

/**
 * Band slots and ribbon trapezoids for every axis of the payload,
 * scaled to `width` pixels.
 */
export function computeLayout(payload: ParallelSetsPayload, width = PLOT_WIDTH): SetsLayout {
  const total = Math.max(1, payload.total);
  const stated = new Map(payload.nodes.map((node) => [node.category, node.count]));
  const bands = payload.axes.map((_, i) =>
    bandFor(marginals(payload, i), total, width, i === 0 ? stated : null),
  );
  const ribbons: RibbonShape[][] = payload.ribbons.map((layer, i) => {
    const sourceBand = new Map(bands[i].map((b) => [b.category, b]));
    const targetBand = new Map(bands[i + 1].map((b) => [b.category, b]));
    const sourceCursor = new Map<string, number>();
    const targetCursor = new Map<string, number>();
    return layer.map((ribbon: Ribbon) => {
      const source = sourceBand.get(ribbon.source)!;
      const target = targetBand.get(ribbon.target)!;
      const sWidth = scaleWithin(source, ribbon.count, layerTotalFor(layer, "source", ribbon.source));
      const tWidth = scaleWithin(target, ribbon.count, layerTotalFor(layer, "target", ribbon.target));
      const sx0 = source.x0 + (sourceCursor.get(ribbon.source) ?? 0);
      const tx0 = target.x0 + (targetCursor.get(ribbon.target) ?? 0);
      sourceCursor.set(ribbon.source, sx0 + sWidth - source.x0);
      targetCursor.set(ribbon.target, tx0 + tWidth - target.x0);
      return {
        source: ribbon.source,
        target: ribbon.target,
        count: ribbon.count,
        sx0,
        sx1: sx0 + sWidth,
        tx0,
        tx1: tx0 + tWidth,
      };
    });
  });
  return { bands, ribbons };
}

function layerTotalFor(layer: Ribbon[], side: "source" | "target", category: string): number {
  let total = 0;
  for (const ribbon of layer) {
    if (ribbon[side] === category) total += ribbon.count;
  }
  return Math.max(1, total);
}

function scaleWithin(band: BandSegment, count: number, bandTotal: number): number {
  return ((band.x1 - band.x0) * count) / bandTotal;
}

function categoryColor(index: number): string {
  return RESERVED_CLASS_COLORS[index % RESERVED_CLASS_COLORS.length];
}

function axisHandleList(payload: ParallelSetsPayload): string {
  const items = payload.axes.map((axis) =>
    el(
      "li",
      { class: "axis-handle", draggable: true, "data-axis": axis, "data-action": "drag-axis" },
      esc(axis.replaceAll("_", " ")),
    ),
  );
  return el("ul", { class: "axis-order" }, items);
}

/** Render the parallel-sets view for one payload. */
export function renderParallelSets(payload: ParallelSetsPayload): string {
  if (payload.total === 0 || payload.nodes.length === 0) {
    return el(
      "section",
      { class: "parallel-sets" },
      el("p", { class: "empty-state" }, esc("No workers to break down.")),
    );
  }
  const layout = computeLayout(payload);
  const height = payload.axes.length * BAND_HEIGHT + (payload.axes.length - 1) * RIBBON_HEIGHT;
  const parts: string[] = [];
  layout.bands.forEach((band, i) => {
    const y = i * (BAND_HEIGHT + RIBBON_HEIGHT);
    parts.push(
      el(
        "text",
        { x: 0, y: y - 6 < 0 ? 12 : y - 6, class: "axis-name", "data-axis": payload.axes[i] },
        esc(payload.axes[i].replaceAll("_", " ")),
      ),
    );
    band.forEach((segment, j) => {
      parts.push(
        el("rect", {
          x: segment.x0.toFixed(1),
          y,
          width: Math.max(1, segment.x1 - segment.x0).toFixed(1),
          height: BAND_HEIGHT,
          class: "category-rect",
          fill: categoryColor(j),
          "data-axis": payload.axes[i],
          "data-category": segment.category,
          "data-count": segment.count === null ? null : rawAttr(segment.count),
        }),
      );
      const label =
        segment.count === null ? segment.category : `${segment.category} (${segment.count})`;
      parts.push(
        el(
          "text",
          {
            x: (segment.x0 + 3).toFixed(1),
            y: y + BAND_HEIGHT - 8,
            class: "category-label",
          },
          esc(label),
        ),
      );
    });
  });
  layout.ribbons.forEach((layer, i) => {
    const yTop = i * (BAND_HEIGHT + RIBBON_HEIGHT) + BAND_HEIGHT;
    const yBottom = yTop + RIBBON_HEIGHT;
    for (const shape of layer) {
      const points =
        `${shape.sx0.toFixed(1)},${yTop} ${shape.sx1.toFixed(1)},${yTop} ` +
        `${shape.tx1.toFixed(1)},${yBottom} ${shape.tx0.toFixed(1)},${yBottom}`;
      parts.push(
        el("polygon", {
          points,
          class: "ribbon",
          "data-source": shape.source,
          "data-target": shape.target,
          "data-count": rawAttr(shape.count),
        }),
      );
    }
  });
  const svg = el(
    "svg",
    {
      class: "sets-plot",
      viewBox: `0 0 ${PLOT_WIDTH} ${height + 16}`,
      width: PLOT_WIDTH,
      height: height + 16,
    },
    parts,
  );
  return el(
    "section",
    { class: "parallel-sets" },
    el("p", { class: "hint" }, esc("Drag an axis name to reorder; the view re-queries.")),
    axisHandleList(payload),
    svg,
  );
}

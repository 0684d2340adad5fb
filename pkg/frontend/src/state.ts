/**
 * Analyst view state and its two projections.
 *
 * The state is the single driver of the interface: it serializes to the
 * URL (reloading reproduces the identical display) and every state
 * change maps to exactly one API query, produced by `queryForState`.
 */

import type {
  EmbeddingItems,
  EmbeddingMethod,
  GlyphKind,
  MatrixMode,
  SortKey,
} from "./types.js";

export type ViewTab =
  | "overview"
  | "consensus"
  | "similarity"
  | "parallel-sets"
  | "timeline"
  | "wordcloud";

export interface ViewState {
  /** Active dataset id; null until one is picked from the timeline. */
  dataset: string | null;
  tab: ViewTab;
  mode: MatrixMode;
  sort: SortKey;
  /** Consensus threshold in percent, 1% granularity. */
  threshold: number;
  /** Whether marked workers/segments are excluded from statistics. */
  exclude: boolean;
  worker: string | null;
  segment: string | null;
  /** Selected word-cloud token; filters linked views to its commenters. */
  word: string | null;
  /** Parallel-sets axis order (drag-to-reorder). */
  axes: readonly string[];
  items: EmbeddingItems;
  method: EmbeddingMethod;
  glyph: GlyphKind;
  /** Axes selected for distance weighting in the similarity view. */
  weights: readonly string[];
  /** Timeline date filter, ISO dates. */
  from: string | null;
  to: string | null;
}

/** Slider granularity in percent. */
export const SLIDER_STEP_PERCENT = 1;

export const DEFAULT_AXES: readonly string[] = [
  "gender",
  "age_bracket",
  "education_level",
];

export const DEFAULT_STATE: ViewState = {
  dataset: null,
  tab: "timeline",
  mode: "response",
  sort: "time",
  threshold: 50,
  exclude: false,
  worker: null,
  segment: null,
  word: null,
  axes: DEFAULT_AXES,
  items: "workers",
  method: "mds",
  glyph: "polyps",
  weights: [],
  from: null,
  to: null,
};

const TABS: readonly ViewTab[] = [
  "overview",
  "consensus",
  "similarity",
  "parallel-sets",
  "timeline",
  "wordcloud",
];
const MODES: readonly MatrixMode[] = ["response", "statistics"];
const SORTS: readonly SortKey[] = ["time", "polyps", "accuracy", "fn"];
const ITEMS: readonly EmbeddingItems[] = ["workers", "segments"];
const METHODS: readonly EmbeddingMethod[] = ["mds", "tsne"];
const GLYPHS: readonly GlyphKind[] = ["polyps", "accuracy"];

/** Snap to the 1% slider grid and clamp to [0, 100]. */
export function clampThreshold(value: number): number {
  if (Number.isNaN(value)) return DEFAULT_STATE.threshold;
  const snapped = Math.round(value / SLIDER_STEP_PERCENT) * SLIDER_STEP_PERCENT;
  return Math.min(100, Math.max(0, snapped));
}

function pick<T extends string>(value: string | null, allowed: readonly T[], fallback: T): T {
  return allowed.includes(value as T) ? (value as T) : fallback;
}

function listParam(value: string | null): string[] {
  if (!value) return [];
  return value
    .split(",")
    .map((part) => part.trim())
    .filter((part) => part.length > 0);
}

/** Serialize to a query string; defaults and nulls are omitted. */
export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  const put = (key: string, value: string | null, fallback: string | null) => {
    if (value !== null && value !== fallback) params.set(key, value);
  };
  put("dataset", state.dataset, null);
  put("tab", state.tab, DEFAULT_STATE.tab);
  put("mode", state.mode, DEFAULT_STATE.mode);
  put("sort", state.sort, DEFAULT_STATE.sort);
  put("threshold", String(state.threshold), String(DEFAULT_STATE.threshold));
  put("exclude", state.exclude ? "on" : "off", "off");
  put("worker", state.worker, null);
  put("segment", state.segment, null);
  put("word", state.word, null);
  put("axes", state.axes.join(","), DEFAULT_AXES.join(","));
  put("items", state.items, DEFAULT_STATE.items);
  put("method", state.method, DEFAULT_STATE.method);
  put("glyph", state.glyph, DEFAULT_STATE.glyph);
  if (state.weights.length > 0) params.set("weights", state.weights.join(","));
  put("from", state.from, null);
  put("to", state.to, null);
  return params.toString();
}

/** Parse a query string back into a state; junk falls back to defaults. */
export function decodeState(query: string): ViewState {
  const params = new URLSearchParams(query);
  const axes = listParam(params.get("axes"));
  return {
    dataset: params.get("dataset"),
    tab: pick(params.get("tab"), TABS, DEFAULT_STATE.tab),
    mode: pick(params.get("mode"), MODES, DEFAULT_STATE.mode),
    sort: pick(params.get("sort"), SORTS, DEFAULT_STATE.sort),
    threshold: clampThreshold(Number(params.get("threshold") ?? DEFAULT_STATE.threshold)),
    exclude: params.get("exclude") === "on",
    worker: params.get("worker"),
    segment: params.get("segment"),
    word: params.get("word"),
    axes: axes.length > 0 ? axes : DEFAULT_AXES,
    items: pick(params.get("items"), ITEMS, DEFAULT_STATE.items),
    method: pick(params.get("method"), METHODS, DEFAULT_STATE.method),
    glyph: pick(params.get("glyph"), GLYPHS, DEFAULT_STATE.glyph),
    weights: listParam(params.get("weights")),
    from: params.get("from"),
    to: params.get("to"),
  };
}

/**
 * Parallel-sets axis order: axes selected for weighting move to the
 * top, followed by the remaining drag order.
 */
export function effectiveAxes(state: ViewState): string[] {
  const rest = state.axes.filter((axis) => !state.weights.includes(axis));
  return [...state.weights, ...rest];
}

/** One API query: path plus query parameters. */
export interface ApiQuery {
  path: string;
  params: Record<string, string>;
}

function excludeParam(state: ViewState): string {
  return state.exclude ? "on" : "off";
}

/**
 * The single query the current state needs. A state without a dataset
 * always resolves to the dataset timeline.
 */
export function queryForState(state: ViewState): ApiQuery {
  const dataset = state.dataset;
  if (dataset === null || state.tab === "timeline") {
    const params: Record<string, string> = {};
    if (state.from !== null) params.from = state.from;
    if (state.to !== null) params.to = state.to;
    return { path: "/datasets", params };
  }
  const base = `/datasets/${encodeURIComponent(dataset)}`;
  switch (state.tab) {
    case "overview":
      return { path: `${base}/overview`, params: { exclude: excludeParam(state) } };
    case "consensus":
      if (state.worker !== null) {
        return {
          path: `${base}/similar-workers`,
          params: { probe: state.worker, k: "5" },
        };
      }
      return {
        path: `${base}/consensus`,
        params: {
          threshold: String(state.threshold),
          mode: state.mode,
          sort: state.sort,
          exclude: excludeParam(state),
        },
      };
    case "similarity": {
      const params: Record<string, string> = {
        items: state.items,
        method: state.method,
        glyph: state.glyph,
        exclude: excludeParam(state),
      };
      if (state.weights.length > 0) params.weights = state.weights.join(",");
      return { path: `${base}/embedding`, params };
    }
    case "parallel-sets":
      return {
        path: `${base}/parallel-sets`,
        params: { axes: effectiveAxes(state).join(","), exclude: excludeParam(state) },
      };
    case "wordcloud":
      return { path: `${base}/wordcloud`, params: { exclude: excludeParam(state) } };
  }
}

/**
 * Concurrency key: at most one request may be in flight per view, so
 * the key is simply the tab that owns the query.
 */
export function viewKeyFor(state: ViewState): string {
  return state.dataset === null ? "timeline" : state.tab;
}

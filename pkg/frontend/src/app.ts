/**
 * Application shell: a single controller owns the view state, issues
 * exactly one API query per state change (latest-wins per view) and
 * re-renders the page from cached payloads.
 *
 * `Controller` is DOM-free so the steering loop can be tested headless;
 * `boot` wires it to the real document via event delegation.
 */

import { ApiClient, ApiError, isAbort } from "./api.js";
import { el, esc } from "./html.js";
import {
  DEFAULT_STATE,
  decodeState,
  encodeState,
  queryForState,
  viewKeyFor,
  clampThreshold,
  type ViewState,
  type ViewTab,
} from "./state.js";
import type {
  ConsensusPayload,
  EmbeddingPayload,
  OverviewPayload,
  ParallelSetsPayload,
  SimilarPayload,
  TimelinePayload,
  WordCloudPayload,
} from "./types.js";
import { renderConsensusMap, renderSimilarPanel } from "./views/consensus.js";
import { renderEmbedding } from "./views/embedding.js";
import { renderOverview } from "./views/overview.js";
import { renderParallelSets } from "./views/parallelSets.js";
import { renderTimeline } from "./views/timeline.js";
import { renderWordCloud, workersForWord } from "./views/wordcloud.js";

const TABS: { tab: ViewTab; label: string }[] = [
  { tab: "overview", label: "overview" },
  { tab: "consensus", label: "consensus map" },
  { tab: "similarity", label: "similarity" },
  { tab: "parallel-sets", label: "parallel sets" },
  { tab: "timeline", label: "timeline" },
  { tab: "wordcloud", label: "word cloud" },
];

/** Payloads the active session has fetched, one slot per view. */
export interface PayloadCache {
  timeline?: TimelinePayload;
  overview?: OverviewPayload;
  consensus?: ConsensusPayload;
  similar?: SimilarPayload;
  embedding?: EmbeddingPayload;
  parallelSets?: ParallelSetsPayload;
  wordcloud?: WordCloudPayload;
}

export type RenderSink = (html: string, state: ViewState) => void;
export type UrlSink = (query: string) => void;

/** Fields whose change invalidates a focused worker selection. */
const SELECTION_RESETTERS: (keyof ViewState)[] = [
  "threshold",
  "mode",
  "sort",
  "exclude",
  "dataset",
  "tab",
];

export class Controller {
  state: ViewState = DEFAULT_STATE;
  readonly cache: PayloadCache = {};
  lastError: ApiError | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly render: RenderSink,
    private readonly onUrl: UrlSink = () => {},
  ) {}

  /** Decode a URL query, fetch the one view it needs and render. */
  async start(query: string): Promise<void> {
    this.state = decodeState(query);
    await this.refresh();
  }

  /** Apply a state patch; every call issues exactly one API query. */
  async apply(patch: Partial<ViewState>): Promise<void> {
    const next: ViewState = { ...this.state, ...patch };
    next.threshold = clampThreshold(next.threshold);
    if (
      this.state.worker !== null &&
      patch.worker === undefined &&
      SELECTION_RESETTERS.some((field) => patch[field] !== undefined)
    ) {
      next.worker = null;
    }
    if (patch.dataset !== undefined && patch.dataset !== this.state.dataset) {
      next.worker = patch.worker ?? null;
      next.segment = null;
      next.word = null;
      delete this.cache.overview;
      delete this.cache.consensus;
      delete this.cache.similar;
      delete this.cache.embedding;
      delete this.cache.parallelSets;
      delete this.cache.wordcloud;
    }
    this.state = next;
    this.onUrl(encodeState(next));
    await this.refresh();
  }

  /**
   * Mark a worker or segment anomalous. The write is one POST; the
   * caches are dropped so every view refreshes from the service.
   */
  async mark(target: "worker" | "segment", targetId: string): Promise<void> {
    if (this.state.dataset === null) return;
    await this.api.annotate(this.state.dataset, {
      target,
      target_id: targetId,
      marked_by: "analyst",
    });
    for (const key of Object.keys(this.cache) as (keyof PayloadCache)[]) {
      if (key !== "timeline") delete this.cache[key];
    }
    await this.refresh();
  }

  /** Fetch the single query the current state maps to, then render. */
  private async refresh(): Promise<void> {
    const query = queryForState(this.state);
    const key = viewKeyFor(this.state);
    try {
      const payload = await this.api.get<unknown>(query, key);
      this.store(payload);
      this.lastError = null;
    } catch (error) {
      if (isAbort(error)) return;
      this.lastError =
        error instanceof ApiError
          ? error
          : new ApiError("internal", String(error), 0);
    }
    this.render(renderApp(this.state, this.cache, this.lastError), this.state);
  }

  private store(payload: unknown): void {
    const state = this.state;
    if (state.dataset === null || state.tab === "timeline") {
      this.cache.timeline = payload as TimelinePayload;
      return;
    }
    switch (state.tab) {
      case "overview":
        this.cache.overview = payload as OverviewPayload;
        break;
      case "consensus":
        if (state.worker !== null) {
          this.cache.similar = payload as SimilarPayload;
        } else {
          this.cache.consensus = payload as ConsensusPayload;
          delete this.cache.similar;
        }
        break;
      case "similarity":
        this.cache.embedding = payload as EmbeddingPayload;
        break;
      case "parallel-sets":
        this.cache.parallelSets = payload as ParallelSetsPayload;
        break;
      case "wordcloud":
        this.cache.wordcloud = payload as WordCloudPayload;
        break;
    }
  }
}

function navBar(state: ViewState, cache: PayloadCache): string {
  const tabs = TABS.map((entry) =>
    el(
      "button",
      {
        class: entry.tab === state.tab ? "tab active" : "tab",
        "data-action": "tab",
        "data-tab": entry.tab,
      },
      esc(entry.label),
    ),
  );
  const options = (cache.timeline?.datasets ?? []).map((dataset) =>
    el(
      "option",
      { value: dataset.id, selected: dataset.id === state.dataset },
      esc(`${dataset.id} (${dataset.created_on})`),
    ),
  );
  const picker = el(
    "label",
    { class: "dataset-picker" },
    "dataset ",
    el(
      "select",
      { "data-action": "select-dataset" },
      el("option", { value: "", selected: state.dataset === null }, "choose…"),
      options,
    ),
  );
  return el("nav", { class: "topbar" }, el("h1", {}, "crowd consensus"), picker, tabs);
}

function activeView(state: ViewState, cache: PayloadCache): string {
  if (state.dataset === null || state.tab === "timeline") {
    return cache.timeline === undefined
      ? loading()
      : renderTimeline(cache.timeline, state);
  }
  switch (state.tab) {
    case "overview":
      return cache.overview === undefined ? loading() : renderOverview(cache.overview);
    case "consensus": {
      if (cache.consensus === undefined) return loading();
      const commenters =
        state.word !== null && cache.wordcloud !== undefined
          ? workersForWord(cache.wordcloud, state.word)
          : null;
      const matrix = renderConsensusMap(cache.consensus, state, {
        similar: state.worker !== null ? cache.similar : null,
        commenters,
      });
      const panel =
        state.worker !== null && cache.similar !== undefined
          ? renderSimilarPanel(cache.similar)
          : "";
      return matrix + panel;
    }
    case "similarity":
      return cache.embedding === undefined ? loading() : renderEmbedding(cache.embedding, state);
    case "parallel-sets":
      return cache.parallelSets === undefined
        ? loading()
        : renderParallelSets(cache.parallelSets);
    case "wordcloud":
      return cache.wordcloud === undefined
        ? loading()
        : renderWordCloud(cache.wordcloud, state);
  }
}

function loading(): string {
  return el("p", { class: "loading" }, "loading…");
}

function errorBanner(error: ApiError | null): string {
  if (error === null) return "";
  return el(
    "p",
    { class: "error-banner", "data-code": error.code },
    esc(`${error.code}: ${error.message}`),
  );
}

/** Render the whole page from state + cached payloads. */
export function renderApp(
  state: ViewState,
  cache: PayloadCache,
  error: ApiError | null = null,
): string {
  return el(
    "div",
    { class: "app" },
    navBar(state, cache),
    errorBanner(error),
    el("main", { class: `view view-${state.tab}` }, activeView(state, cache)),
  );
}

function closest(event: Event, selector: string): HTMLElement | null {
  const target = event.target as HTMLElement | null;
  return target?.closest?.(selector) ?? null;
}

/** Attach the controller to the live document. */
export function boot(apiBase = ""): Controller {
  const api = new ApiClient(apiBase);
  const root = document.getElementById("app");
  if (root === null) throw new Error("missing #app element");
  const controller = new Controller(
    api,
    (html) => {
      root.innerHTML = html;
    },
    (query) => {
      history.replaceState(null, "", query ? `?${query}` : location.pathname);
    },
  );

  root.addEventListener("click", (event) => {
    const hit = closest(event, "[data-action]");
    if (hit === null) return;
    const action = hit.dataset.action;
    const state = controller.state;
    if (action === "tab") void controller.apply({ tab: hit.dataset.tab as ViewTab });
    else if (action === "select-dataset" && hit.dataset.dataset !== undefined) {
      void controller.apply({
        dataset: hit.dataset.dataset,
        tab: state.tab === "timeline" ? "overview" : state.tab,
      });
    } else if (action === "select-worker") {
      const worker = hit.dataset.worker ?? null;
      void controller.apply({ worker: worker === state.worker ? null : worker });
    } else if (action === "select-segment") {
      const segment = hit.dataset.segment ?? null;
      void controller.apply({ segment: segment === state.segment ? null : segment });
    } else if (action === "select-word") {
      const word = hit.dataset.word ?? null;
      void controller.apply({ word: word === state.word ? null : word });
    } else if (action === "mark-worker" && hit.dataset.worker !== undefined) {
      void controller.mark("worker", hit.dataset.worker);
    } else if (action === "mark-segment" && hit.dataset.segment !== undefined) {
      void controller.mark("segment", hit.dataset.segment);
    }
  });

  root.addEventListener("input", (event) => {
    const hit = closest(event, "input[data-action='threshold']");
    if (hit === null) return;
    void controller.apply({ threshold: Number((hit as HTMLInputElement).value) });
  });

  root.addEventListener("change", (event) => {
    const hit = closest(event, "[data-action]");
    if (hit === null) return;
    const input = hit as HTMLInputElement | HTMLSelectElement;
    const action = input.dataset.action;
    if (action === "sort") void controller.apply({ sort: input.value as ViewState["sort"] });
    else if (action === "mode") void controller.apply({ mode: input.value as ViewState["mode"] });
    else if (action === "items") {
      void controller.apply({ items: input.value as ViewState["items"] });
    } else if (action === "method") {
      void controller.apply({ method: input.value as ViewState["method"] });
    } else if (action === "glyph") {
      void controller.apply({ glyph: input.value as ViewState["glyph"] });
    } else if (action === "exclude") {
      void controller.apply({ exclude: (input as HTMLInputElement).checked });
    } else if (action === "weight" && input.dataset.axis !== undefined) {
      const axis = input.dataset.axis;
      const weights = controller.state.weights.includes(axis)
        ? controller.state.weights.filter((a) => a !== axis)
        : [...controller.state.weights, axis];
      void controller.apply({ weights });
    } else if (action === "select-dataset") {
      void controller.apply({
        dataset: input.value === "" ? null : input.value,
        tab: controller.state.tab === "timeline" && input.value !== "" ? "overview" : controller.state.tab,
      });
    } else if (action === "from") {
      void controller.apply({ from: input.value === "" ? null : input.value });
    } else if (action === "to") {
      void controller.apply({ to: input.value === "" ? null : input.value });
    }
  });

  let draggedAxis: string | null = null;
  root.addEventListener("dragstart", (event) => {
    const hit = closest(event, "li[data-axis]");
    draggedAxis = hit?.dataset.axis ?? null;
  });
  root.addEventListener("dragover", (event) => {
    if (draggedAxis !== null && closest(event, "li[data-axis]") !== null) {
      event.preventDefault();
    }
  });
  root.addEventListener("drop", (event) => {
    const hit = closest(event, "li[data-axis]");
    if (hit === null || draggedAxis === null) return;
    event.preventDefault();
    const over = hit.dataset.axis!;
    const axes = reorderAxes(controller.state.axes, draggedAxis, over);
    draggedAxis = null;
    void controller.apply({ axes });
  });

  window.addEventListener("popstate", () => {
    void controller.start(location.search);
  });

  void controller.start(location.search);
  return controller;
}

/** Move `dragged` so it lands at `over`'s original index (drag-to-reorder). */
export function reorderAxes(
  axes: readonly string[],
  dragged: string,
  over: string,
): string[] {
  if (dragged === over || !axes.includes(dragged) || !axes.includes(over)) {
    return [...axes];
  }
  const without = axes.filter((axis) => axis !== dragged);
  without.splice(axes.indexOf(over), 0, dragged);
  return without;
}

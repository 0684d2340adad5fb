/**
 * Consensus-matrix view: one row per worker, one column per video
 * segment, with vote margins, fly-through direction band, demographic
 * row labels and the threshold slider.
 *
 * Every statistic shown (SE/SP, accuracy, vote ratios, normalized
 * times) is taken verbatim from the /consensus payload; raw values are
 * mirrored onto data-* attributes so the display can be audited against
 * the API body.
 */

import { rawAttr, formatMs, formatPercent } from "../format.js";
import { el, esc } from "../html.js";
import { cellColor, labelColor, legendEntries } from "../palette.js";
import { SLIDER_STEP_PERCENT, type ViewState } from "../state.js";
import type {
  ConsensusPayload,
  MatrixRow,
  SimilarPayload,
  SortKey,
  VoteSummary,
} from "../types.js";

const SORT_OPTIONS: { key: SortKey; label: string }[] = [
  { key: "time", label: "total task time" },
  { key: "polyps", label: "polyps found" },
  { key: "accuracy", label: "accuracy" },
  { key: "fn", label: "false negatives" },
];

/** Extra linked-view context: similarity hits and word commenters. */
export interface ConsensusExtras {
  similar?: SimilarPayload | null;
  commenters?: readonly string[] | null;
}

function slider(state: ViewState): string {
  return el(
    "label",
    { class: "slider" },
    "consensus threshold ",
    el("input", {
      type: "range",
      min: 0,
      max: 100,
      step: SLIDER_STEP_PERCENT,
      value: state.threshold,
      "data-action": "threshold",
    }),
    el("span", { class: "threshold-value" }, esc(`${state.threshold}%`)),
  );
}

function readout(payload: ConsensusPayload): string {
  const c = payload.confusion;
  return el(
    "span",
    {
      class: "readout",
      "data-sensitivity": rawAttr(payload.sensitivity),
      "data-specificity": rawAttr(payload.specificity),
      "data-n-polyp-labels": rawAttr(payload.n_polyp_labels),
    },
    esc(
      `SE ${formatPercent(payload.sensitivity)} · SP ${formatPercent(payload.specificity)}` +
        ` · ${payload.n_polyp_labels} polyp labels` +
        ` · TP ${c.tp} FP ${c.fp} TN ${c.tn} FN ${c.fn}`,
    ),
  );
}

function sortSelect(state: ViewState): string {
  const options = SORT_OPTIONS.map((option) =>
    el(
      "option",
      { value: option.key, selected: option.key === state.sort },
      esc(option.label),
    ),
  );
  return el("label", {}, "sort by ", el("select", { "data-action": "sort" }, options));
}

function modeSelect(state: ViewState): string {
  const options = (["response", "statistics"] as const).map((mode) =>
    el("option", { value: mode, selected: mode === state.mode }, esc(mode)),
  );
  return el("label", {}, "mode ", el("select", { "data-action": "mode" }, options));
}

function excludeToggle(state: ViewState): string {
  return el(
    "label",
    { class: "exclude-toggle" },
    el("input", { type: "checkbox", "data-action": "exclude", checked: state.exclude }),
    " exclude marked",
  );
}

function legend(state: ViewState): string {
  const entries = legendEntries(state.mode).map((entry) =>
    el(
      "span",
      { class: "legend-entry" },
      el("span", { class: "swatch", style: `background:${entry.color}` }),
      esc(entry.label),
    ),
  );
  return el("span", { class: "legend" }, entries);
}

function directionBand(payload: ConsensusPayload): string {
  const cells = payload.columns.map((column) =>
    el(
      "th",
      {
        class: `direction direction-${column.direction}`,
        "data-segment": column.segment_id,
        title: column.direction,
      },
      esc(column.direction === "antegrade" ? ">" : "<"),
    ),
  );
  return el("tr", { class: "direction-band" }, el("th", {}, "direction"), cells);
}

function ordinalRow(payload: ConsensusPayload): string {
  const cells = payload.columns.map((column) =>
    el(
      "th",
      { class: "ordinal", "data-segment": column.segment_id },
      el(
        "button",
        { "data-action": "mark-segment", "data-segment": column.segment_id },
        esc(String(column.ordinal)),
      ),
    ),
  );
  return el("tr", { class: "ordinals" }, el("th", {}, "segment"), cells);
}

function labelRow(payload: ConsensusPayload): string {
  const cells = payload.columns.map((column) =>
    el(
      "th",
      { class: "label-cell", "data-segment": column.segment_id, "data-label": column.label },
      el("span", {
        class: `label-chip label-${column.label}`,
        style: `background:${labelColor(column.label)}`,
        title: column.label,
      }),
    ),
  );
  return el("tr", { class: "labels" }, el("th", {}, "consensus"), cells);
}

function marginRow(payload: ConsensusPayload): string {
  const bySegment = new Map<string, VoteSummary>(
    payload.votes.map((vote) => [vote.segment_id, vote]),
  );
  const cells = payload.columns.map((column) => {
    const vote = bySegment.get(column.segment_id);
    if (vote === undefined) {
      return el("th", { class: "margin margin-unviewed", "data-segment": column.segment_id });
    }
    return el(
      "th",
      {
        class: "margin",
        "data-segment": column.segment_id,
        "data-viewers": rawAttr(vote.n_viewers),
        "data-polyp-votes": rawAttr(vote.n_polyp_votes),
        "data-polyp-ratio": rawAttr(vote.polyp_ratio),
        title: `${vote.n_polyp_votes}/${vote.n_viewers} polyp votes`,
      },
      el("span", {
        class: "margin-bar",
        style: `height:${(vote.polyp_ratio * 100).toFixed(1)}%`,
      }),
    );
  });
  return el("tr", { class: "margins" }, el("th", {}, "votes"), cells);
}

function rowClasses(row: MatrixRow, extras: ConsensusExtras): string {
  const classes = ["worker-row"];
  const similar = extras.similar ?? null;
  if (similar !== null) {
    if (row.worker_id === similar.worker_id) classes.push("similar-probe");
    for (const hit of similar.similar) {
      if (hit.worker_id !== row.worker_id) continue;
      classes.push(hit.exact_match ? "similar-exact" : "similar-hit");
    }
  }
  if ((extras.commenters ?? null) !== null && extras.commenters!.includes(row.worker_id)) {
    classes.push("word-commenter");
  }
  return classes.join(" ");
}

function workerHeader(row: MatrixRow): string {
  const profile = row.profile;
  const aggregate = row.aggregate;
  return el(
    "th",
    { class: "worker-label", "data-worker": row.worker_id },
    el(
      "button",
      { "data-action": "select-worker", "data-worker": row.worker_id },
      esc(row.worker_id),
    ),
    el(
      "span",
      { class: "demographics" },
      esc(`${profile.gender} · ${profile.age_bracket} · ${profile.education_level}`),
    ),
    el(
      "span",
      {
        class: "aggregate",
        "data-accuracy": rawAttr(aggregate.accuracy),
        "data-normalized-time": rawAttr(aggregate.normalized_task_time),
        title: `accuracy ${formatPercent(aggregate.accuracy)}, total ${formatMs(
          aggregate.total_task_time_ms,
        )}`,
      },
      el("span", {
        class: "agg-bar",
        style: `width:${(aggregate.normalized_task_time * 100).toFixed(1)}%`,
      }),
    ),
    el(
      "button",
      { class: "mark", "data-action": "mark-worker", "data-worker": row.worker_id },
      "mark",
    ),
  );
}

function workerRow(payload: ConsensusPayload, row: MatrixRow, extras: ConsensusExtras): string {
  const cells = new Map(row.cells.map((cell) => [cell.segment_id, cell]));
  const tds = payload.columns.map((column) => {
    const cell = cells.get(column.segment_id);
    if (cell === undefined) {
      return el("td", {
        class: "cell cell-missing",
        "data-worker": row.worker_id,
        "data-segment": column.segment_id,
      });
    }
    return el(
      "td",
      {
        class: "cell",
        "data-worker": row.worker_id,
        "data-segment": column.segment_id,
        "data-element": cell.element,
        "data-relative-time": rawAttr(cell.relative_time),
        style: `background:${cellColor(cell.element, payload.mode)}`,
      },
      el("span", {
        class: "time-bar",
        style: `width:${(cell.relative_time * 100).toFixed(1)}%`,
      }),
    );
  });
  return el("tr", { class: rowClasses(row, extras), "data-worker": row.worker_id }, workerHeader(row), tds);
}

/** Side panel listing the probe's exact and top-k similar matches. */
export function renderSimilarPanel(payload: SimilarPayload): string {
  const hits = payload.similar.map((hit) =>
    el(
      "li",
      {
        class: hit.exact_match ? "similar exact" : "similar",
        "data-worker": hit.worker_id,
        "data-score": rawAttr(hit.score),
      },
      el(
        "button",
        { "data-action": "select-worker", "data-worker": hit.worker_id },
        esc(hit.worker_id),
      ),
      esc(` ${hit.score.toFixed(4)}${hit.exact_match ? " (exact)" : ""}`),
    ),
  );
  return el(
    "aside",
    { class: "similar-panel", "data-probe": payload.worker_id },
    el("h3", {}, esc(`workers similar to ${payload.worker_id}`)),
    el("p", { class: "signature" }, esc(`signature ${payload.signature}`)),
    el("ul", {}, hits),
    el("button", { "data-action": "select-worker", "data-worker": payload.worker_id }, "close"),
  );
}

/** Render the full consensus map for one payload + view state. */
export function renderConsensusMap(
  payload: ConsensusPayload,
  state: ViewState,
  extras: ConsensusExtras = {},
): string {
  const controls = el(
    "header",
    { class: "consensus-controls" },
    slider(state),
    readout(payload),
    sortSelect(state),
    modeSelect(state),
    excludeToggle(state),
    legend(state),
  );
  if (payload.rows.length === 0) {
    return el(
      "section",
      { class: "consensus" },
      controls,
      el(
        "p",
        { class: "empty-state" },
        esc(`No responses yet: every segment of ${payload.dataset_id} is unviewed.`),
      ),
    );
  }
  const table = el(
    "table",
    { class: "matrix" },
    el("thead", {}, directionBand(payload), ordinalRow(payload), labelRow(payload), marginRow(payload)),
    el("tbody", {}, payload.rows.map((row) => workerRow(payload, row, extras))),
  );
  return el("section", { class: "consensus" }, controls, table);
}

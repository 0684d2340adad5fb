/**
 * Study timeline: one bar per dataset in date order. Bar height encodes
 * the worker count and fill encodes the crowd's mean accuracy, both
 * straight from the /datasets payload; clicking a bar activates that
 * dataset in every other view.
 */

import { rawAttr, formatPercent } from "../format.js";
import { el, esc } from "../html.js";
import { accuracyColor } from "../palette.js";
import type { ViewState } from "../state.js";
import type { TimelinePayload } from "../types.js";

const BAR_AREA_HEIGHT = 180;
const BAR_WIDTH = 42;
const BAR_GAP = 18;

function dateFilter(state: ViewState): string {
  return el(
    "header",
    { class: "timeline-controls" },
    el(
      "label",
      {},
      "from ",
      el("input", { type: "date", "data-action": "from", value: state.from ?? "" }),
    ),
    el(
      "label",
      {},
      "to ",
      el("input", { type: "date", "data-action": "to", value: state.to ?? "" }),
    ),
  );
}

/** Render the timeline for one /datasets payload. */
export function renderTimeline(payload: TimelinePayload, state: ViewState): string {
  if (payload.bars.length === 0) {
    return el(
      "section",
      { class: "timeline" },
      dateFilter(state),
      el("p", { class: "empty-state" }, esc("No datasets in this date range.")),
    );
  }
  const maxWorkers = Math.max(...payload.bars.map((bar) => bar.n_workers), 1);
  const width = payload.bars.length * (BAR_WIDTH + BAR_GAP) + BAR_GAP;
  const parts: string[] = [];
  payload.bars.forEach((bar, i) => {
    const height = Math.max(2, (bar.n_workers / maxWorkers) * BAR_AREA_HEIGHT);
    const x = BAR_GAP + i * (BAR_WIDTH + BAR_GAP);
    const y = BAR_AREA_HEIGHT - height;
    parts.push(
      el("rect", {
        x,
        y: y.toFixed(1),
        width: BAR_WIDTH,
        height: height.toFixed(1),
        fill: accuracyColor(bar.mean_accuracy),
        class: bar.dataset_id === state.dataset ? "dataset-bar selected" : "dataset-bar",
        "data-action": "select-dataset",
        "data-dataset": bar.dataset_id,
        "data-workers": rawAttr(bar.n_workers),
        "data-responses": rawAttr(bar.n_responses),
        "data-mean-accuracy": rawAttr(bar.mean_accuracy),
      }),
    );
    parts.push(
      el(
        "text",
        { x: x + BAR_WIDTH / 2, y: BAR_AREA_HEIGHT + 14, class: "bar-label" },
        esc(bar.dataset_id),
      ),
    );
    parts.push(
      el(
        "text",
        { x: x + BAR_WIDTH / 2, y: BAR_AREA_HEIGHT + 28, class: "bar-date" },
        esc(bar.created_on),
      ),
    );
    parts.push(
      el(
        "title",
        {},
        esc(
          `${bar.dataset_id}: ${bar.n_workers} workers, ${bar.n_responses} responses, ` +
            `mean accuracy ${formatPercent(bar.mean_accuracy)}`,
        ),
      ),
    );
  });
  const svg = el(
    "svg",
    {
      class: "timeline-plot",
      viewBox: `0 0 ${width} ${BAR_AREA_HEIGHT + 36}`,
      width,
      height: BAR_AREA_HEIGHT + 36,
    },
    parts,
  );
  return el("section", { class: "timeline" }, dateFilter(state), svg);
}

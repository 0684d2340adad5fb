/**
 * Comment word cloud: the top-k tokens sized by their fetched counts.
 * Clicking a word selects it; the commenting workers arrive with the
 * payload (`worker_ids`), so linked views can highlight them without
 * the client ever re-tokenizing a comment.
 */

import { rawAttr } from "../format.js";
import { el, esc } from "../html.js";
import type { ViewState } from "../state.js";
import type { WordCloudPayload } from "../types.js";

const MIN_FONT_PX = 12;
const MAX_FONT_PX = 42;

/** Font size for a count within [min, max] of the cloud (display scale). */
export function fontSize(count: number, minCount: number, maxCount: number): number {
  if (maxCount <= minCount) return MAX_FONT_PX;
  const t = (count - minCount) / (maxCount - minCount);
  return Math.round(MIN_FONT_PX + t * (MAX_FONT_PX - MIN_FONT_PX));
}

/** Workers behind a word, straight from the payload; [] when absent. */
export function workersForWord(payload: WordCloudPayload, word: string | null): string[] {
  if (word === null) return [];
  const entry = payload.words.find((w) => w.word === word);
  return entry === undefined ? [] : [...entry.worker_ids];
}

/** Render the word cloud for one /wordcloud payload. */
export function renderWordCloud(payload: WordCloudPayload, state: ViewState): string {
  if (payload.words.length === 0) {
    return el(
      "section",
      { class: "wordcloud" },
      el("p", { class: "empty-state" }, esc("No comments to summarize.")),
    );
  }
  const counts = payload.words.map((w) => w.count);
  const minCount = Math.min(...counts);
  const maxCount = Math.max(...counts);
  const tokens = payload.words.map((entry) =>
    el(
      "button",
      {
        class: entry.word === state.word ? "word selected" : "word",
        style: `font-size:${fontSize(entry.count, minCount, maxCount)}px`,
        "data-action": "select-word",
        "data-word": entry.word,
        "data-count": rawAttr(entry.count),
        "data-workers": entry.worker_ids.join(","),
        title: `${entry.count}× by ${entry.worker_ids.join(", ")}`,
      },
      esc(entry.word),
    ),
  );
  const selectedNote =
    state.word === null
      ? ""
      : el(
          "p",
          { class: "word-filter-note" },
          esc(
            `Filtering linked views to commenters of "${state.word}": ` +
              `${workersForWord(payload, state.word).join(", ") || "none"}`,
          ),
        );
  return el("section", { class: "wordcloud" }, el("div", { class: "words" }, tokens), selectedNote);
}

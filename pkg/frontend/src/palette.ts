/**
 * Fixed color keys for the categorical views.
 *
 * Two qualitative palettes are frozen here: a 2-class key for response
 * mode (polyp / polyp-free) and a 3-class key for statistics mode
 * (correct / false positive / false negative). Both draw from a single
 * reserved list of at most 12 distinguishable class colors so new
 * categorical encodings never collide with existing ones.
 */

import type { CellElement, MatrixMode, SegmentLabel } from "./types.js";

/** The full reserved qualitative range; categorical views pick from here. */
export const RESERVED_CLASS_COLORS: readonly string[] = [
  "#1f78b4",
  "#e31a1c",
  "#33a02c",
  "#ff7f00",
  "#6a3d9a",
  "#b15928",
  "#a6cee3",
  "#fb9a99",
  "#b2df8a",
  "#fdbf6f",
  "#cab2d6",
  "#ffff99",
];

/** Response-mode key: what the worker answered. */
export const RESPONSE_PALETTE: Readonly<Record<"polyp" | "polyp_free", string>> = {
  polyp: "#e31a1c",
  polyp_free: "#1f78b4",
};

/** Statistics-mode key: how the answer compares with ground truth. */
export const STATISTICS_PALETTE: Readonly<
  Record<"correct" | "false_positive" | "false_negative", string>
> = {
  correct: "#33a02c",
  false_positive: "#ff7f00",
  false_negative: "#6a3d9a",
};

/** Neutral fills; deliberately outside the reserved class range. */
export const ABSENT_COLOR = "#d9d9d9";
export const UNVIEWED_COLOR = "#f0f0f0";

/** Fill for one matrix cell under the active mode's key. */
export function cellColor(element: CellElement, mode: MatrixMode): string {
  if (mode === "response") {
    return element === "polyp" ? RESPONSE_PALETTE.polyp : RESPONSE_PALETTE.polyp_free;
  }
  switch (element) {
    case "correct":
      return STATISTICS_PALETTE.correct;
    case "false_positive":
      return STATISTICS_PALETTE.false_positive;
    case "false_negative":
      return STATISTICS_PALETTE.false_negative;
    default:
      return ABSENT_COLOR;
  }
}

/** Fill for a segment's consensus label chip. */
export function labelColor(label: SegmentLabel): string {
  if (label === "polyp") return RESPONSE_PALETTE.polyp;
  if (label === "polyp_free") return RESPONSE_PALETTE.polyp_free;
  return UNVIEWED_COLOR;
}

/** Human-readable legend entries for the active mode. */
export function legendEntries(mode: MatrixMode): { label: string; color: string }[] {
  if (mode === "response") {
    return [
      { label: "polyp", color: RESPONSE_PALETTE.polyp },
      { label: "polyp-free", color: RESPONSE_PALETTE.polyp_free },
    ];
  }
  return [
    { label: "correct", color: STATISTICS_PALETTE.correct },
    { label: "false positive", color: STATISTICS_PALETTE.false_positive },
    { label: "false negative", color: STATISTICS_PALETTE.false_negative },
  ];
}

const ACCURACY_LOW: readonly number[] = [215, 48, 39];
const ACCURACY_HIGH: readonly number[] = [26, 152, 80];
const ACCURACY_UNKNOWN = "#bdbdbd";

/**
 * Sequential fill for a mean-accuracy value in [0, 1]; the value itself
 * always comes from the service, this only maps it to a color.
 */
export function accuracyColor(accuracy: number | null): string {
  if (accuracy === null || Number.isNaN(accuracy)) return ACCURACY_UNKNOWN;
  const t = Math.min(1, Math.max(0, accuracy));
  const mix = ACCURACY_LOW.map((low, i) => Math.round(low + (ACCURACY_HIGH[i] - low) * t));
  return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
}

/**
 * Display formatting for fetched values.
 *
 * Formatting is the only transformation the UI applies to a number: it
 * never aggregates, rescales or re-derives statistics. Raw values are
 * additionally carried on data-* attributes so the rendered output can
 * be compared against the API body verbatim.
 */

/** "NA" for statistics the service could not compute. */
export const NOT_AVAILABLE = "NA";

/** 0.6521… -> "65.2%"; null -> "NA". */
export function formatPercent(value: number | null): string {
  if (value === null || Number.isNaN(value)) return NOT_AVAILABLE;
  return `${(value * 100).toFixed(1)}%`;
}

/** 0.42 -> "0.42"; null -> "NA". */
export function formatRatio(value: number | null): string {
  if (value === null || Number.isNaN(value)) return NOT_AVAILABLE;
  return value.toFixed(2);
}

/** 12345 -> "12.3 s"; sub-second values keep milliseconds. */
export function formatMs(value: number | null): string {
  if (value === null || Number.isNaN(value)) return NOT_AVAILABLE;
  if (value < 1000) return `${Math.round(value)} ms`;
  return `${(value / 1000).toFixed(1)} s`;
}

/**
 * Raw value for a data-* attribute; `String(x)` round-trips doubles
 * exactly, so equality checks against the parsed API body stay exact.
 */
export function rawAttr(value: number | boolean | string | null): string {
  return value === null ? "null" : String(value);
}

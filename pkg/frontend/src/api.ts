/**
 * Typed client for the crowd-consensus HTTP service.
 *
 * Failures arrive as the service's canonical envelope and surface as
 * `ApiError`. Reads are keyed by view: issuing a new request for a view
 * aborts the one still in flight, so the newest state always wins.
 */

import type { ApiQuery } from "./state.js";
import type {
  AnnotationCreated,
  AnnotationRequest,
  ErrorEnvelope,
} from "./types.js";

/** A service failure, decoded from the {code, message, detail} envelope. */
export class ApiError extends Error {
  readonly code: string;
  readonly status: number;
  readonly detail: unknown;

  constructor(code: string, message: string, status: number, detail: unknown = null) {
    super(message);
    this.name = "ApiError";
    this.code = code;
    this.status = status;
    this.detail = detail;
  }
}

/** True when a rejection is only a superseded request, not a failure. */
export function isAbort(error: unknown): boolean {
  return error instanceof DOMException && error.name === "AbortError";
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;
  private readonly inflight = new Map<string, AbortController>();

  constructor(base = "", fetchFn: FetchLike = (input, init) => fetch(input, init)) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  /** Absolute request URL for a query. */
  url(query: ApiQuery): string {
    const params = new URLSearchParams(query.params).toString();
    return `${this.base}${query.path}${params ? `?${params}` : ""}`;
  }

  /**
   * GET one view payload. When `viewKey` is given, a previous request
   * under the same key is aborted first (latest-wins per view).
   */
  async get<T>(query: ApiQuery, viewKey?: string): Promise<T> {
    let signal: AbortSignal | undefined;
    if (viewKey !== undefined) {
      this.inflight.get(viewKey)?.abort();
      const controller = new AbortController();
      this.inflight.set(viewKey, controller);
      signal = controller.signal;
    }
    const response = await this.fetchFn(this.url(query), { signal });
    return this.decode<T>(response);
  }

  /** POST an anomaly annotation; resolves with the 201 body. */
  async annotate(datasetId: string, body: AnnotationRequest): Promise<AnnotationCreated> {
    const path = `/datasets/${encodeURIComponent(datasetId)}/annotations`;
    const response = await this.fetchFn(`${this.base}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return this.decode<AnnotationCreated>(response);
  }

  private async decode<T>(response: Response): Promise<T> {
    if (response.ok) {
      return (await response.json()) as T;
    }
    let envelope: ErrorEnvelope;
    try {
      envelope = (await response.json()) as ErrorEnvelope;
    } catch {
      throw new ApiError("internal", `HTTP ${response.status}`, response.status);
    }
    throw new ApiError(
      envelope.code ?? "internal",
      envelope.message ?? `HTTP ${response.status}`,
      response.status,
      envelope.detail ?? null,
    );
  }
}

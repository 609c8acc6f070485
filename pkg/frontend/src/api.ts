/**
 * Typed client for the claimtrace HTTP service.
 *
 * Every call returns the parsed document together with the exact body
 * text, so views can display server-rendered numbers byte-for-byte.
 * Errors carry the server's error/detail body verbatim.
 */

import type {
  ApiResult,
  ClaimListDoc,
  ContradictionsDoc,
  GateDecisionDoc,
  GraphListDoc,
  MetricsDoc,
  PathDoc,
  ResolutionVerdict,
  SessionDoc,
  Verdict,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string,
  ) {
    super(`${code}: ${detail}`);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class WorkbenchApi {
  constructor(
    readonly baseUrl: string = "",
    readonly token: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private headers(hasBody: boolean): Record<string, string> {
    const headers: Record<string, string> = {};
    if (hasBody) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    return headers;
  }

  private async call<T>(method: string, path: string, body?: unknown): Promise<ApiResult<T>> {
    const init: RequestInit = { method, headers: this.headers(body !== undefined) };
    if (body !== undefined) init.body = JSON.stringify(body);
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const raw = await response.text();
    if (!response.ok) {
      let code = `http_${response.status}`;
      let detail = raw;
      try {
        const parsed = JSON.parse(raw) as { error?: string; detail?: string };
        if (parsed.error) code = parsed.error;
        if (parsed.detail) detail = parsed.detail;
      } catch {
        // non-JSON error body: keep the raw text as the detail
      }
      throw new ApiError(response.status, code, detail);
    }
    return { doc: JSON.parse(raw) as T, raw };
  }

  graphs(): Promise<ApiResult<GraphListDoc>> {
    return this.call("GET", "/graphs");
  }

  claims(graphId: string): Promise<ApiResult<ClaimListDoc>> {
    return this.call("GET", `/graphs/${encodeURIComponent(graphId)}/claims`);
  }

  path(claimId: string, graphId: string): Promise<ApiResult<PathDoc>> {
    const scope = `?graph_id=${encodeURIComponent(graphId)}`;
    return this.call("GET", `/claims/${encodeURIComponent(claimId)}/path${scope}`);
  }

  metrics(graphId: string): Promise<ApiResult<MetricsDoc>> {
    return this.call("GET", `/graphs/${encodeURIComponent(graphId)}/metrics`);
  }

  contradictions(graphId: string): Promise<ApiResult<ContradictionsDoc>> {
    return this.call("GET", `/graphs/${encodeURIComponent(graphId)}/contradictions`);
  }

  evaluate(graphId: string, claimId: string): Promise<ApiResult<GateDecisionDoc>> {
    return this.call(
      "POST",
      `/graphs/${encodeURIComponent(graphId)}/gate/${encodeURIComponent(claimId)}`,
    );
  }

  resolve(
    annotationId: string,
    graphId: string,
    verdict: ResolutionVerdict,
    auditorId: string,
  ): Promise<ApiResult<{ graph_id: string; annotation_id: string; seq: number }>> {
    return this.call("POST", `/contradictions/${encodeURIComponent(annotationId)}/resolution`, {
      verdict,
      auditor_id: auditorId,
      graph_id: graphId,
    });
  }

  createSession(graphId: string, auditorId: string): Promise<ApiResult<SessionDoc>> {
    return this.call("POST", "/sessions", { graph_id: graphId, auditor_id: auditorId });
  }

  session(sessionId: string): Promise<ApiResult<SessionDoc>> {
    return this.call("GET", `/sessions/${encodeURIComponent(sessionId)}`);
  }

  openTimer(sessionId: string, claimId: string): Promise<ApiResult<SessionDoc>> {
    return this.call(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/claims/${encodeURIComponent(claimId)}/open`,
    );
  }

  closeTimer(sessionId: string, claimId: string, verdict: Verdict): Promise<ApiResult<SessionDoc>> {
    return this.call(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/claims/${encodeURIComponent(claimId)}/close`,
      { verdict },
    );
  }
}

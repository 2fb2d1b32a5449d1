/**
 * Typed client for the annotation server's JSON API.
 *
 * Every method mirrors one endpoint; the fetch implementation is injectable
 * so tests can run without a server. Server-side failures arrive as
 * `{code, message, location?}` documents and are re-thrown as ApiError with
 * the server's wording intact — the UI never rewrites diagnostics.
 */

import type { TrackKind } from "./axes.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface ClockInfo {
  state: "running" | "stopped";
  offset_minutes: number;
}

export interface SessionDocument {
  schema_version: string;
  film: { title: string; runtime_minutes?: number };
  tracks: Array<{
    subject: string;
    kind: TrackKind;
    axes: string[];
    moments: Array<{ t: number; v: [number, number, number]; note?: string }>;
  }>;
}

export interface SessionInfo {
  id: string;
  revision: number;
  clock: ClockInfo;
  session: SessionDocument;
}

export interface CurveResponse {
  revision: number;
  subject: string;
  times: number[];
  /** 3-vectors for axis functions, plain numbers for combined ones. */
  values: Array<number | [number, number, number]>;
  provenance: string;
}

export interface AppendResult {
  revision: number;
  t: number;
}

export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly status: number,
    readonly location?: Record<string, unknown>,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let code = "Http";
  let message = `${response.status} ${response.statusText}`;
  let location: Record<string, unknown> | undefined;
  try {
    const body = await response.json();
    if (body && typeof body.code === "string") {
      code = body.code;
      message = body.message ?? message;
      location = body.location;
    }
  } catch {
    // non-JSON error body; keep the HTTP status text
  }
  throw new ApiError(code, message, response.status, location);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => unwrap<T>(r));
  }

  createSession(title: string, runtimeMinutes?: number): Promise<{ id: string; revision: number }> {
    return this.post("/sessions", {
      title,
      runtime_minutes: runtimeMinutes,
    });
  }

  getSession(id: string): Promise<SessionInfo> {
    return this.fetchFn(`${this.baseUrl}/sessions/${id}`).then((r) => unwrap<SessionInfo>(r));
  }

  clock(
    id: string,
    action: "start" | "pause" | "seek",
    offsetMinutes?: number,
  ): Promise<{ revision: number; clock: ClockInfo }> {
    return this.post(`/sessions/${id}/clock`, {
      action,
      offset_minutes: offsetMinutes,
    });
  }

  appendMoment(
    id: string,
    subject: string,
    kind: TrackKind,
    values: [number, number, number],
    t?: number,
    note?: string,
  ): Promise<AppendResult> {
    return this.post(`/sessions/${id}/moments`, {
      subject,
      kind,
      values,
      t,
      note,
    });
  }

  undoLast(id: string, subject: string, kind: TrackKind): Promise<{ revision: number }> {
    const q = new URLSearchParams({ subject, kind });
    return this.fetchFn(`${this.baseUrl}/sessions/${id}/moments/last?${q}`, {
      method: "DELETE",
    }).then((r) => unwrap<{ revision: number }>(r));
  }

  getCurve(
    id: string,
    subject: string,
    kind: TrackKind,
    fn: "instant" | "combined" | "accumulated" | "accumulated-combined",
    stepSeconds = 15,
  ): Promise<CurveResponse> {
    const q = new URLSearchParams({
      subject,
      kind,
      fn,
      step: String(stepSeconds),
    });
    return this.fetchFn(`${this.baseUrl}/sessions/${id}/curves?${q}`).then((r) =>
      unwrap<CurveResponse>(r),
    );
  }

  /** Strip image URL; `revision` busts the browser cache on change. */
  stripUrl(
    id: string,
    subject: string,
    kind: TrackKind,
    revision: number,
    mode = "instant",
    secondsPerPixel = 10,
  ): string {
    const q = new URLSearchParams({
      subject,
      kind,
      mode,
      format: "png",
      seconds_per_pixel: String(secondsPerPixel),
      rev: String(revision),
    });
    return `${this.baseUrl}/sessions/${id}/strip?${q}`;
  }
}

/**
 * Console state machine: a pure view of server state plus at most one
 * optimistic pending entry.
 *
 * The console never fabricates timestamps (times come from the server clock
 * or an explicit manual entry) and never does moment math — curves and
 * strips are always server-rendered. Panels refetch only when the server
 * revision changes, so an idle session costs one small poll per second.
 */

import {
  ApiClient,
  ApiError,
  type ClockInfo,
  type CurveResponse,
  type SessionInfo,
} from "./api.js";
import { snapMagnitude, type AxisInfo, type TrackKind } from "./axes.js";

export interface PendingMoment {
  subject: string;
  kind: TrackKind;
  values: [number, number, number];
}

export interface ConsoleState {
  sessionId: string | null;
  subject: string;
  kind: TrackKind;
  /** Slider value in [-1, 1], snapped to steps of 0.05. */
  magnitude: number;
  /** Last revision whose curves/strip the panels have rendered. */
  revision: number;
  pollIntervalMs: number;
  pending: PendingMoment | null;
  lastError: string | null;
}

export interface CurvePanelData {
  revision: number;
  axes: CurveResponse;
  combined: CurveResponse;
  accumulatedCombined: CurveResponse;
}

/** Rendering callbacks; the DOM layer supplies these. */
export interface ConsoleView {
  onClock(clock: ClockInfo): void;
  onCurves(data: CurvePanelData): void;
  onStrip(url: string, revision: number): void;
  /** Optimistic echo of a just-clicked moment, before the server confirms. */
  onEcho(pending: PendingMoment): void;
  /** The echo turned out to be wrong; remove it. */
  onRollback(pending: PendingMoment): void;
  onError(message: string | null): void;
}

export class AnnotationConsole {
  readonly state: ConsoleState;
  private timer: ReturnType<typeof setInterval> | null = null;
  private polling = false;

  constructor(
    private readonly api: ApiClient,
    private readonly view: ConsoleView,
    pollIntervalMs = 1000,
  ) {
    this.state = {
      sessionId: null,
      subject: "",
      kind: "discourse",
      magnitude: 0.2,
      revision: -1,
      pollIntervalMs,
      pending: null,
      lastError: null,
    };
  }

  async connect(sessionId: string): Promise<void> {
    this.state.sessionId = sessionId;
    this.state.revision = -1; // force a first paint
    await this.tick();
  }

  setSubject(subject: string, kind: TrackKind): void {
    this.state.subject = subject;
    this.state.kind = kind;
    this.state.revision = -1; // panels now show a different track
  }

  setMagnitude(raw: number): void {
    this.state.magnitude = snapMagnitude(raw);
  }

  start(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => void this.tick(), this.state.pollIntervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  /**
   * One polling step: read the session head; if the revision moved,
   * refetch each panel exactly once. Network failures are non-blocking —
   * the last good revision stays on screen.
   */
  async tick(): Promise<void> {
    const id = this.state.sessionId;
    if (!id || this.polling) return;
    this.polling = true;
    try {
      const info = await this.api.getSession(id);
      this.view.onClock(info.clock);
      if (info.revision !== this.state.revision) {
        await this.refreshPanels(id, info);
      }
      this.setError(null);
    } catch (err) {
      this.setError(describe(err));
    } finally {
      this.polling = false;
    }
  }

  private async refreshPanels(id: string, info: SessionInfo): Promise<void> {
    const { subject, kind } = this.state;
    const hasTrack = info.session.tracks.some(
      (tr) => tr.subject === subject && tr.kind === kind,
    );
    if (subject && hasTrack) {
      const [axes, combined, accumulatedCombined] = await Promise.all([
        this.api.getCurve(id, subject, kind, "instant"),
        this.api.getCurve(id, subject, kind, "combined"),
        this.api.getCurve(id, subject, kind, "accumulated-combined"),
      ]);
      this.view.onCurves({ revision: info.revision, axes, combined, accumulatedCombined });
      this.view.onStrip(this.api.stripUrl(id, subject, kind, info.revision), info.revision);
    }
    this.state.revision = info.revision;
  }

  /**
   * Append one moment: the clicked axis carries the slider magnitude, the
   * other two components are zero. With no manual time the server clock
   * stamps it; a stopped clock is surfaced as the server's own error.
   */
  async annotate(axis: AxisInfo, manualTimeMinutes?: number): Promise<boolean> {
    const id = this.state.sessionId;
    if (!id) return false;
    if (this.state.pending) return false; // at most one in-flight mutation
    const subject = axis.kind === "story" ? "story" : this.state.subject;
    if (!subject) {
      this.setError("pick a subject first");
      return false;
    }
    const values: [number, number, number] = [0, 0, 0];
    values[axis.index] = this.state.magnitude;
    const pending: PendingMoment = { subject, kind: axis.kind, values };
    this.state.pending = pending;
    this.view.onEcho(pending);
    try {
      await this.api.appendMoment(id, subject, axis.kind, values, manualTimeMinutes);
      this.state.pending = null;
      await this.tick(); // reconcile to the server document at the new revision
      return true;
    } catch (err) {
      this.state.pending = null;
      this.view.onRollback(pending);
      this.setError(describe(err));
      return false;
    }
  }

  async undo(): Promise<boolean> {
    const id = this.state.sessionId;
    if (!id || this.state.pending) return false;
    const { subject, kind } = this.state;
    try {
      await this.api.undoLast(id, subject, kind);
      await this.tick();
      return true;
    } catch (err) {
      this.setError(describe(err));
      return false;
    }
  }

  async clock(action: "start" | "pause" | "seek", offsetMinutes?: number): Promise<void> {
    const id = this.state.sessionId;
    if (!id) return;
    try {
      const result = await this.api.clock(id, action, offsetMinutes);
      this.view.onClock(result.clock);
      this.setError(null);
    } catch (err) {
      this.setError(describe(err));
    }
  }

  private setError(message: string | null): void {
    this.state.lastError = message;
    this.view.onError(message);
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return `${err.code}: ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}

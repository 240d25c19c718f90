/** Session state: editable config form, debounced writes, revision
 * tracking, measurement list, and the A/B compare selection.
 *
 * The store performs no pixel math — every displayed number comes back
 * from the server. Edits are collected into the form model; one debounce
 * window after the last edit, exactly one PUT fires, followed by one
 * preview fetch showing the server's echo.
 */

import { StaleRevisionError, WorkbenchApi } from "./api.js";
import { debounce, realTimers, TimerHost } from "./debounce.js";
import type {
  AnalysisResponse,
  AttackSpec,
  MeasurementInfo,
  PipelineConfig,
  PreviewResponse,
} from "./types.js";

export const DEBOUNCE_MS = 300;

export interface StoreEvents {
  onPreview?: (preview: PreviewResponse) => void;
  onConfigEcho?: (config: PipelineConfig, revision: number) => void;
  onMeasurements?: (list: MeasurementInfo[]) => void;
  onAnalysis?: (analysis: AnalysisResponse) => void;
  onNotice?: (message: string) => void;
}

export interface ValidationIssue {
  field: string;
  message: string;
}

/** Client-side range checks mirroring the server schema; invalid values
 * never leave the form. */
export function validateConfig(config: PipelineConfig): ValidationIssue[] {
  const issues: ValidationIssue[] = [];
  if (!(config.tone_gamma > 0)) {
    issues.push({ field: "tone_gamma", message: "gamma must be > 0" });
  }
  if (!(config.exposure_time > 0)) {
    issues.push({ field: "exposure_time", message: "exposure must be > 0" });
  }
  if (!(config.analog_gain >= 1)) {
    issues.push({ field: "analog_gain", message: "gain must be >= 1" });
  }
  if (!(config.line_time > 0)) {
    issues.push({ field: "line_time", message: "line time must be > 0" });
  }
  if (config.wb_gains.some((g) => g < 0)) {
    issues.push({ field: "wb_gains", message: "white-balance gains must be >= 0" });
  }
  if (
    config.compress_quality !== null &&
    (config.compress_quality < 1 || config.compress_quality > 100)
  ) {
    issues.push({ field: "compress_quality", message: "quality must lie in 1..100" });
  }
  return issues;
}

export class SessionStore {
  sessionId = "";
  revision = 0;
  /** Form model: always serializes to a schema-valid config. */
  form: PipelineConfig | null = null;
  measurements: MeasurementInfo[] = [];
  compare: { a: number | null; b: number | null } = { a: null, b: null };
  lastAnalysis: AnalysisResponse | null = null;

  private writer: { call: () => void; cancel: () => void; pending: () => boolean };
  private refreshing = false;

  constructor(
    private api: WorkbenchApi,
    private events: StoreEvents = {},
    timers: TimerHost = realTimers,
  ) {
    this.writer = debounce(() => void this.flush(), DEBOUNCE_MS, timers);
  }

  async start(scenario: string): Promise<void> {
    const session = await this.api.createSession(scenario);
    this.sessionId = session.id;
    this.revision = session.revision;
    this.form = session.config;
    this.events.onConfigEcho?.(session.config, session.revision);
    await this.refreshPreview();
  }

  /** Rebuild state for an existing session (page reload round-trip). */
  async hydrate(sessionId: string, measurementCount: number): Promise<void> {
    this.sessionId = sessionId;
    const envelope = await this.api.getConfig(sessionId);
    this.revision = envelope.revision;
    this.form = envelope.config;
    this.events.onConfigEcho?.(envelope.config, envelope.revision);
    const list: MeasurementInfo[] = [];
    for (let i = 0; i < measurementCount; i++) {
      list.push(await this.api.getMeasurement(sessionId, i));
    }
    this.measurements = list;
    this.events.onMeasurements?.(list);
    await this.refreshPreview();
  }

  /** Apply one form edit; the write is debounced. Returns validation
   * issues; when non-empty the edit is rejected and nothing is sent. */
  edit(patch: Partial<PipelineConfig>): ValidationIssue[] {
    if (!this.form) throw new Error("no session");
    const next = { ...this.form, ...patch };
    const issues = validateConfig(next);
    if (issues.length > 0) return issues;
    this.form = next;
    this.writer.call();
    return [];
  }

  /** Debounce fired: exactly one PUT, then one preview refresh. */
  private async flush(): Promise<void> {
    if (!this.form) return;
    try {
      const echo = await this.api.putConfig(this.sessionId, this.revision, this.form);
      this.revision = echo.revision;
      this.form = echo.config;
      this.events.onConfigEcho?.(echo.config, echo.revision);
      await this.refreshPreview();
    } catch (err) {
      if (err instanceof StaleRevisionError) {
        // someone else wrote first: reload their config and tell the user
        const envelope = await this.api.getConfig(this.sessionId);
        this.revision = envelope.revision;
        this.form = envelope.config;
        this.events.onConfigEcho?.(envelope.config, envelope.revision);
        this.events.onNotice?.(
          "config changed in another client; reloaded the current settings",
        );
        await this.refreshPreview();
      } else {
        this.events.onNotice?.(String(err));
      }
    }
  }

  async refreshPreview(): Promise<void> {
    if (this.refreshing) return;
    this.refreshing = true;
    try {
      const preview = await this.api.preview(this.sessionId);
      this.events.onPreview?.(preview);
    } finally {
      this.refreshing = false;
    }
  }

  async setAttack(spec: AttackSpec | null): Promise<void> {
    const result = await this.api.putAttack(this.sessionId, spec);
    this.revision = result.revision;
    await this.refreshPreview();
  }

  async measure(): Promise<MeasurementInfo> {
    const entry = await this.api.measure(this.sessionId);
    this.measurements = [...this.measurements, entry];
    this.events.onMeasurements?.(this.measurements);
    return entry;
  }

  selectCompare(slot: "a" | "b", index: number): void {
    if (index < 0 || index >= this.measurements.length) {
      this.events.onNotice?.(`unknown measurement ${index}`);
      return;
    }
    this.compare = { ...this.compare, [slot]: index };
  }

  /** Fetch the server-computed A/B diff; bins are passed through as-is. */
  async compareAnalysis(roi: string | null, signed = true): Promise<AnalysisResponse | null> {
    const { a, b } = this.compare;
    if (a === null || b === null) {
      this.events.onNotice?.("select two measurements to compare");
      return null;
    }
    const analysis = await this.api.analysis(this.sessionId, a, b, roi, signed);
    this.lastAnalysis = analysis;
    this.events.onAnalysis?.(analysis);
    return analysis;
  }

  hasPendingWrite(): boolean {
    return this.writer.pending();
  }
}

/** Clamp an ROI drag to the image bounds, preserving a 1x1 minimum. */
export function clampRoi(
  roi: { x: number; y: number; w: number; h: number },
  width: number,
  height: number,
): { x: number; y: number; w: number; h: number } {
  const x = Math.min(Math.max(roi.x, 0), width - 1);
  const y = Math.min(Math.max(roi.y, 0), height - 1);
  return {
    x,
    y,
    w: Math.max(1, Math.min(roi.w, width - x)),
    h: Math.max(1, Math.min(roi.h, height - y)),
  };
}

/** Thin typed client over the workbench HTTP API. */

import type {
  AnalysisResponse,
  AttackSpec,
  ConfigEnvelope,
  DetectionsResponse,
  MeasurementInfo,
  PipelineConfig,
  PreviewResponse,
  RiskRecord,
  SessionInfo,
} from "./types.js";

export class StaleRevisionError extends Error {
  constructor(detail: string) {
    super(detail);
    this.name = "StaleRevisionError";
  }
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

async function parseError(response: Response): Promise<never> {
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { detail?: string };
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body: keep the status text
  }
  if (response.status === 409) throw new StaleRevisionError(detail);
  throw new ApiError(response.status, detail);
}

export class WorkbenchApi {
  constructor(
    private baseUrl: string = "",
    private fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  createSession(scenario: string, hdrPreset = false): Promise<SessionInfo> {
    return this.request<SessionInfo>("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ scenario, hdr_preset: hdrPreset }),
    });
  }

  getConfig(sessionId: string): Promise<ConfigEnvelope> {
    return this.request<ConfigEnvelope>(`/sessions/${sessionId}/config`);
  }

  putConfig(
    sessionId: string,
    revision: number,
    config: PipelineConfig,
  ): Promise<ConfigEnvelope> {
    return this.request<ConfigEnvelope>(`/sessions/${sessionId}/config`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ revision, config }),
    });
  }

  putAttack(
    sessionId: string,
    spec: AttackSpec | null,
  ): Promise<{ revision: number; attack: AttackSpec | null }> {
    return this.request(`/sessions/${sessionId}/attack`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ spec }),
    });
  }

  preview(sessionId: string): Promise<PreviewResponse> {
    return this.request<PreviewResponse>(
      `/sessions/${sessionId}/preview?format=json`,
    );
  }

  measure(sessionId: string): Promise<MeasurementInfo & { count: number }> {
    return this.request(`/sessions/${sessionId}/measure`, { method: "POST" });
  }

  getMeasurement(sessionId: string, index: number): Promise<MeasurementInfo> {
    return this.request(`/sessions/${sessionId}/measurements/${index}`);
  }

  analysis(
    sessionId: string,
    a: number,
    b: number,
    roi: string | null,
    signed = true,
  ): Promise<AnalysisResponse> {
    const params = new URLSearchParams({
      a: String(a),
      b: String(b),
      signed: String(signed),
    });
    if (roi) params.set("roi", roi);
    return this.request<AnalysisResponse>(
      `/sessions/${sessionId}/analysis?${params.toString()}`,
    );
  }

  detections(sessionId: string, m: number, preIsp = false): Promise<DetectionsResponse> {
    const params = new URLSearchParams({ m: String(m), pre_isp: String(preIsp) });
    return this.request<DetectionsResponse>(
      `/sessions/${sessionId}/detections?${params.toString()}`,
    );
  }

  riskCatalog(): Promise<{ records: RiskRecord[] }> {
    return this.request("/risk/catalog");
  }
}

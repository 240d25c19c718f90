/** DOM wiring for the capture tool: parameter panel, attack toggles,
 * live preview, measurement list, and the A/B compare view. */

import { WorkbenchApi } from "./api.js";
import { renderHistogramSvg } from "./histogram.js";
import { base64ToBytes, decodePpm } from "./ppm.js";
import { clampRoi, SessionStore } from "./store.js";
import type {
  AnalysisResponse,
  AttackSpec,
  MeasurementInfo,
  PipelineConfig,
  PreviewResponse,
} from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function drawPreview(canvas: HTMLCanvasElement, preview: PreviewResponse): void {
  const decoded = decodePpm(base64ToBytes(preview.ppm_base64));
  canvas.width = decoded.width;
  canvas.height = decoded.height;
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.putImageData(new ImageData(decoded.rgba, decoded.width, decoded.height), 0, 0);
}

const BLINDING_PRESET: AttackSpec = {
  kind: "blinding",
  center: [96.0, 146.0],
  radius: 5.0,
  intensity: 2.66e9,
  channel_weights: [1.0, 0.08, 0.07],
  psf_sigma: 52.0,
};

const FLICKER_PRESET: AttackSpec = {
  kind: "flicker",
  frequency_hz: 1000.0,
  intensity: 1.2e9,
  duty: 0.5,
  region: [0, 0, 192, 192],
};

export function boot(): void {
  const api = new WorkbenchApi("");
  const status = el<HTMLElement>("status");
  const canvas = el<HTMLCanvasElement>("preview");
  const revisionBadge = el<HTMLElement>("revision");
  const measurementList = el<HTMLElement>("measurements");
  const histogramPanel = el<HTMLElement>("histogram");
  const statsPanel = el<HTMLElement>("diff-stats");
  const validation = el<HTMLElement>("validation");

  const store = new SessionStore(api, {
    onPreview: (preview) => {
      drawPreview(canvas, preview);
      revisionBadge.textContent = `rev ${preview.revision}`;
    },
    onConfigEcho: (config, revision) => {
      syncForm(config);
      revisionBadge.textContent = `rev ${revision}`;
    },
    onMeasurements: (list) => renderMeasurements(list),
    onAnalysis: (analysis) => renderAnalysis(analysis),
    onNotice: (message) => {
      status.textContent = message;
    },
  });

  const fields: Array<[string, (value: number) => Partial<PipelineConfig>]> = [
    ["exposure_time", (v) => ({ exposure_time: v })],
    ["analog_gain", (v) => ({ analog_gain: v })],
    ["tone_gamma", (v) => ({ tone_gamma: v })],
    ["black_level", (v) => ({ black_level: Math.round(v) })],
  ];

  function syncForm(config: PipelineConfig): void {
    for (const [name] of fields) {
      const input = el<HTMLInputElement>(`field-${name}`);
      input.value = String(config[name as keyof PipelineConfig]);
    }
    el<HTMLInputElement>("field-hdr").checked = config.hdr !== "off";
    el<HTMLInputElement>("field-denoise").checked = config.denoise === "median3";
    (el<HTMLSelectElement>("field-demosaic") as HTMLSelectElement).value = config.demosaic;
  }

  function renderMeasurements(list: MeasurementInfo[]): void {
    measurementList.innerHTML = "";
    for (const m of list) {
      const row = document.createElement("li");
      row.textContent = `#${m.index} (rev ${m.revision}${m.attack ? ", attacked" : ""}) `;
      const a = document.createElement("button");
      a.textContent = "A";
      a.onclick = () => store.selectCompare("a", m.index);
      const b = document.createElement("button");
      b.textContent = "B";
      b.onclick = () => store.selectCompare("b", m.index);
      row.append(a, b);
      measurementList.append(row);
    }
  }

  function renderAnalysis(analysis: AnalysisResponse): void {
    histogramPanel.innerHTML = renderHistogramSvg(analysis.histograms);
    const rows = analysis.stats.diff
      .map(
        (s) =>
          `<tr><td>${s.channel}</td><td>${s.mean.toFixed(2)}</td>` +
          `<td>${s.std.toFixed(2)}</td><td>${s.min}</td><td>${s.max}</td></tr>`,
      )
      .join("");
    statsPanel.innerHTML =
      `<table><tr><th>ch</th><th>mean</th><th>std</th><th>min</th><th>max</th></tr>${rows}</table>`;
  }

  for (const [name, patch] of fields) {
    const input = el<HTMLInputElement>(`field-${name}`);
    input.addEventListener("input", () => {
      const issues = store.edit(patch(Number(input.value)));
      validation.textContent = issues.map((i) => `${i.field}: ${i.message}`).join("; ");
    });
  }

  el<HTMLInputElement>("field-hdr").addEventListener("change", (event) => {
    const on = (event.target as HTMLInputElement).checked;
    store.edit({
      hdr: on ? { n_exposures: 2, exposure_ratio: 8.0 } : "off",
      wb_gains: on ? [2.0, 9.0, 9.0] : [1.0, 1.0, 1.0],
    });
  });
  el<HTMLInputElement>("field-denoise").addEventListener("change", (event) => {
    store.edit({ denoise: (event.target as HTMLInputElement).checked ? "median3" : "off" });
  });
  el<HTMLSelectElement>("field-demosaic").addEventListener("change", (event) => {
    store.edit({ demosaic: (event.target as HTMLSelectElement).value as "nearest" | "bilinear" });
  });

  el<HTMLInputElement>("attack-blinding").addEventListener("change", (event) => {
    const on = (event.target as HTMLInputElement).checked;
    el<HTMLInputElement>("attack-flicker").checked = false;
    void store.setAttack(on ? BLINDING_PRESET : null);
  });
  el<HTMLInputElement>("attack-flicker").addEventListener("change", (event) => {
    const on = (event.target as HTMLInputElement).checked;
    el<HTMLInputElement>("attack-blinding").checked = false;
    void store.setAttack(on ? FLICKER_PRESET : null);
  });

  el<HTMLButtonElement>("measure").addEventListener("click", () => {
    void store.measure().then((m) => {
      status.textContent = `captured measurement #${m.index}`;
    });
  });

  el<HTMLButtonElement>("compare").addEventListener("click", () => {
    const roiText = el<HTMLInputElement>("roi").value.trim();
    let roi: string | null = null;
    if (roiText) {
      const parts = roiText.split(",").map((p) => Number(p));
      if (parts.length === 4 && parts.every((p) => Number.isFinite(p))) {
        const clamped = clampRoi(
          { x: parts[0], y: parts[1], w: parts[2], h: parts[3] },
          192,
          192,
        );
        roi = `${clamped.x},${clamped.y},${clamped.w},${clamped.h}`;
        el<HTMLInputElement>("roi").value = roi;
      } else {
        status.textContent = "ROI must be x,y,w,h";
        return;
      }
    }
    void store.compareAnalysis(roi, true);
  });

  void store
    .start("stop_sign")
    .then(() => {
      status.textContent = `session ${store.sessionId}`;
    })
    .catch((err) => {
      status.textContent = `failed to start: ${err}`;
    });
}

boot();

/** SVG polylines from server-computed histogram bins.
 *
 * Layout only: bin counts are never recomputed or transformed beyond
 * scaling to pixel coordinates, keeping the server authoritative.
 */

import type { HistogramBins } from "./types.js";

export const CHANNEL_COLORS: Record<string, string> = {
  R: "#cc0000",
  G: "#00aa00",
  B: "#0000cc",
  raw: "#444444",
};

export interface PolylineSpec {
  channel: string;
  color: string;
  /** "x,y x,y ..." pairs for an SVG <polyline>. */
  points: string;
}

export function histogramPolylines(
  bins: HistogramBins[],
  width: number,
  height: number,
): PolylineSpec[] {
  const peak = Math.max(1, ...bins.map((b) => Math.max(0, ...b.counts)));
  return bins.map((b) => {
    const n = b.counts.length;
    const step = n > 1 ? width / (n - 1) : 0;
    const pts: string[] = [];
    for (let i = 0; i < n; i++) {
      const x = i * step;
      const y = height - (b.counts[i] / peak) * (height - 10);
      pts.push(`${x.toFixed(1)},${y.toFixed(1)}`);
    }
    return {
      channel: b.channel,
      color: CHANNEL_COLORS[b.channel] ?? "#000000",
      points: pts.join(" "),
    };
  });
}

/** Axis label positions for a signed histogram: zero line plus extremes. */
export function axisTicks(bins: HistogramBins[], width: number): { x: number; label: string }[] {
  if (bins.length === 0) return [];
  const { offset, counts } = bins[0];
  const n = counts.length;
  if (n < 2) return [];
  const ticks = [offset, 0, offset + n - 1].filter(
    (v, i, arr) => v >= offset && v <= offset + n - 1 && arr.indexOf(v) === i,
  );
  return ticks.map((value) => ({
    x: ((value - offset) / (n - 1)) * width,
    label: String(value),
  }));
}

export function renderHistogramSvg(
  bins: HistogramBins[],
  width = 520,
  height = 220,
): string {
  const lines = histogramPolylines(bins, width, height)
    .map(
      (p) =>
        `<polyline fill="none" stroke="${p.color}" stroke-width="1" points="${p.points}"/>`,
    )
    .join("");
  const ticks = axisTicks(bins, width)
    .map(
      (t) =>
        `<text x="${t.x.toFixed(1)}" y="${height - 2}" font-size="9" fill="#666">${t.label}</text>`,
    )
    .join("");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
    `width="${width}" height="${height}">` +
    `<rect width="${width}" height="${height}" fill="#fff"/>${lines}${ticks}</svg>`
  );
}

/** Payload shapes of the workbench HTTP API. */

export interface HdrBracket {
  n_exposures: number;
  exposure_ratio: number;
}

export interface ScaleSpec {
  target_w: number;
  target_h: number;
  method: "nearest" | "bilinear";
}

export interface PipelineConfig {
  exposure_time: number;
  analog_gain: number;
  line_time: number;
  readout_order: "sequential" | "randomized";
  readout_seed: number;
  hdr: HdrBracket | "off";
  bit_depth: number;
  cfa: string;
  black_level: number;
  defect_map: number[][];
  noise_sigma: number;
  noise_shot: boolean;
  noise_seed: number;
  tone_gamma: number;
  wb_gains: [number, number, number];
  demosaic: "nearest" | "bilinear";
  denoise: "off" | "median3";
  scale: ScaleSpec | null;
  crop: number[] | null;
  compress_quality: number | null;
  output_bit_depth: number;
}

export interface SessionInfo {
  id: string;
  revision: number;
  config: PipelineConfig;
}

export interface ConfigEnvelope {
  revision: number;
  config: PipelineConfig;
}

export interface PreviewResponse {
  revision: number;
  config: PipelineConfig;
  width: number;
  height: number;
  ppm_base64: string;
}

export interface MeasurementInfo {
  index: number;
  revision: number;
  config: PipelineConfig;
  attack: object | null;
  pre_path: string;
  post_path: string;
}

export interface ChannelStats {
  channel: string;
  min: number;
  max: number;
  mean: number;
  std: number;
  snr: number | null;
}

export interface HistogramBins {
  channel: string;
  /** DN value of bins[0]; negative for signed difference histograms. */
  offset: number;
  counts: number[];
}

export interface AnalysisResponse {
  revision: number;
  mode: "signed" | "absolute";
  a: number;
  b: number;
  roi: number[] | null;
  stats: { a: ChannelStats[]; b: ChannelStats[]; diff: ChannelStats[] };
  histograms: HistogramBins[];
}

export interface Detection {
  label: string;
  score: number;
  box: [number, number, number, number];
}

export interface DetectionsResponse {
  revision: number;
  measurement: number;
  pre_isp: boolean;
  detections: Detection[];
}

export interface RiskRecord {
  id: string;
  layer: string;
  entry_point: string;
  attack_class: number;
  computed_sum: number;
  computed_feasibility: string;
  computed_risk: number;
  expected_feasibility: string;
  expected_risk: number;
  matches: boolean;
}

export interface AttackSpec {
  kind: "blinding" | "flicker";
  [key: string]: unknown;
}

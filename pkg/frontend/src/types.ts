/** Wire types for the analysis service (see docs/snapshot-schema.md). */

export interface Coloring {
  bins: number[];              // 0..3, 0 = most central 20% by depth rank
  thresholds: number[];
}

export interface OutlierFlags {
  flags: boolean[];
  lower_fence: number;
}

export interface SimilarityBlock {
  tau: number | null;
  order: number[];             // heatmap permutation
  values: number[][];          // symmetric, unit diagonal
}

export interface SpectralBlock {
  eigenvalues: number[];
  labels: number[];
  order: number[];
  k: number;
  suggested_k: number;
  suggestion_confidence: number;
}

export interface LayoutBlock {
  mode: "force" | "geospatial";
  iterations: number;
  energy: number;
  positions: Array<[number, number]>;
  isolated: number[];
  collision_passes: number;
  polylines?: number[][][];    // [point][time][xy], geospatial curves only
}

export interface HistogramBlock {
  edges: number[];
  counts: number[];
  quantiles: number[];         // band size at 0..100%, tau slider snap points
  log_scale: boolean;
}

export interface AttributeSummary {
  name: string;
  kind: "scalar" | "point" | "categorical_set" | "function" | "curve";
  stacked?: Record<string, number[]>;    // per category, counts per color bin
  five_num?: number[];
  outliers?: number[];
  pointwise?: unknown[];
}

export interface Snapshot {
  snapshot_version: number;
  dataset_id: string;
  n: number;
  band_count: number;
  unmasked_band_count: number;
  tau: number | null;          // null = unrestricted
  tau_quantile: number | null;
  k: number;
  seed: number;
  depths: number[];
  coloring: Coloring;
  outliers: OutlierFlags;
  similarity: SimilarityBlock;
  spectral: SpectralBlock;
  layout: LayoutBlock;
  histogram: HistogramBlock;
  summaries: AttributeSummary[];
}

export interface DatasetStatus {
  id: string;
  status: "building" | "ready" | "error";
  progress: number;
  n: number;
  band_count?: number;
  error?: string;
}

export interface SchemaEntry {
  name: string;
  kind: AttributeSummary["kind"];
  dim?: number;
  universe?: string[];
  grid?: number[];
  time_points?: number;
}

export interface DatasetJson {
  id?: string;
  schema: SchemaEntry[];
  rows: unknown[][];
  labels?: string[];
  metadata?: Record<string, unknown>;
}

/** Either an absolute band-size threshold or a quantile of band sizes. */
export type TauParam =
  | { kind: "absolute"; value: number }
  | { kind: "quantile"; q: number }
  | { kind: "unrestricted" };

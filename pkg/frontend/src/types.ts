/** Typed mirrors of the JSON documents the HTTP API serves.
 *
 * The client performs no statistics of its own: every number rendered
 * anywhere in the UI comes out of one of these documents verbatim.
 */

export type CorrelationMethod = "pearson" | "spearman" | "euclidean";
export type ViewMode = "heatmap" | "graph" | "table";

export interface ColumnInfo {
  name: string;
  kind: "numeric" | "categorical";
  missing_count: number;
}

export interface UploadDoc {
  session_id: string;
  columns: ColumnInfo[];
}

export interface EncodingMapDoc {
  ordinal: Record<string, Record<string, number>>;
  one_hot: Record<string, string[]>;
}

export interface PreprocessDoc {
  imputed_cells: Record<string, number>;
  dropped_rows: number;
  encoding_map: EncodingMapDoc;
  columns: string[];
}

export interface PreprocessRequest {
  imputation?: string;
  encoding?: string;
  columns?: string[];
}

export interface CorrelationDoc {
  method: CorrelationMethod;
  names: string[];
  scores: number[][];
  degenerate: string[];
}

export interface GrangerResultDoc {
  source: string;
  target: string;
  p: number;
  ss_full: number | null;
  ss_constrained: number | null;
  f_statistic: number | null;
  df: [number, number];
  p_value: number | null;
  p_adjusted: number | null;
  significant: boolean;
  fitted_on: number;
  extra_lag_guard: boolean;
  selection_biased: boolean;
  error: string | null;
}

export interface DiscoveryDoc {
  results: GrangerResultDoc[];
  integration: {
    columns: { name: string; order: number; saturated: boolean }[];
    common_order: number;
    guard: boolean;
  };
  config: Record<string, unknown>;
}

export interface DiscoveryRequest {
  alpha?: number;
  p_max?: number | null;
  lag_policy?: "fixed" | "information_criterion" | "scan_best";
  fixed_p?: number;
  criterion?: "aic" | "bic";
  multiple_testing?: "none" | "benjamini_hochberg";
  auto_stationarity?: boolean;
  adf_alpha?: number;
  denominator_df?: "horizon" | "residual";
  conditioning?: "pairwise" | "full";
}

export interface GraphNodeDoc {
  id: string;
  label: string;
  attrs: Record<string, string>;
}

export interface GraphEdgeDoc {
  kind: "causal" | "correlation";
  a: string;
  b: string;
  weight: number;
  method: string | null;
  lag: number | null;
  p_value: number | null;
}

export interface GraphDoc {
  nodes: GraphNodeDoc[];
  edges: GraphEdgeDoc[];
  provenance: {
    dataset: string;
    created_at: string;
    config: Record<string, unknown>;
    integration: unknown;
    filters: unknown[];
  };
}

export interface GraphRequest {
  corr_threshold?: number;
  alpha?: number;
  method?: CorrelationMethod;
  created_at?: string;
}

/** Mirrors the server's filter body; at least one field must be set. */
export interface FilterRequest {
  kinds?: ("correlation" | "causal")[];
  min_abs_weight?: number;
  max_p_value?: number;
  lag_range?: [number, number];
  nodes?: string[];
  neighborhood_radius?: number;
}

/** Stable identity of an edge across documents and renders. */
export function edgeKey(edge: GraphEdgeDoc): string {
  return [edge.kind, edge.a, edge.b, edge.lag ?? 0, edge.method ?? ""].join("|");
}

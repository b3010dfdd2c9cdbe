/** Wire types for the explorer service. The UI renders these verbatim:
 * no selection or evaluation math happens client-side. */

export interface SelectionState {
  method: "score_threshold" | "windowed_uniqueness";
  lambda: number;
  mu: number;
  r_window: number;
}

export interface MetricsPayload {
  true_positives: number;
  false_positives: number;
  selected_count: number;
  eligible_count: number;
  precision: number;
  recall: number;
  f1: number;
}

export interface SessionInfo {
  id: string;
  n: number;
  m: number;
  reference_ids: string[];
  query_ids: string[];
  orientation: "lower_is_better" | "higher_is_better";
  search: {
    method: string;
    d_s: number;
    v_min: number;
    v_max: number;
    v_step: number;
  };
  selection: SelectionState;
  metrics: MetricsPayload | null;
  has_ground_truth: boolean;
  methods_computed: string[];
}

export type MatrixKind = "raw" | "enhanced" | "scores";

export interface MatrixPayload {
  kind: MatrixKind;
  n: number;
  m: number;
  source_n: number;
  source_m: number;
  downsample: number;
  values: number[];
  orientation?: string;
  method?: string;
  valid?: number[];
}

export interface MatchEntry {
  query: number;
  reference: number;
  score: number;
  strength: number;
  uniqueness: number | null;
  accepted: boolean;
}

export interface ReselectResponse {
  selection: SelectionState;
  metrics: MetricsPayload | null;
  accepted_count: number;
  matches: MatchEntry[];
}

export interface TrajectoryCell {
  r: number;
  q: number;
  value: number;
}

export interface MatchDetail {
  query: number;
  proposal: (MatchEntry & { accepted: boolean }) | null;
  trajectory: TrajectoryCell[];
  context: {
    query_indices: number[];
    reference_indices: number[];
  };
}

export interface PRPointPayload {
  threshold: number;
  precision: number;
  recall: number;
  f1: number;
}

export interface PRCurvePayload {
  method: string;
  points: PRPointPayload[];
}

export interface ApiErrorBody {
  error: string;
  detail: string;
}

import type {
  MatchEntry,
  MatrixKind,
  MetricsPayload,
  PRCurvePayload,
  ReselectResponse,
  SelectionState,
  SessionInfo,
} from "./types";

/** Everything the explorer renders. Populated only from service responses;
 * the sole client-side computations are display transforms (clipping,
 * colormap, slider geometry). */
export interface ViewState {
  session: SessionInfo | null;
  matrixKind: MatrixKind;
  clip: [number, number];
  selection: SelectionState | null;
  metrics: MetricsPayload | null;
  matches: MatchEntry[];
  acceptedCount: number;
  selectedQuery: number | null;
  prCurves: Map<string, PRCurvePayload>;
  stale: boolean;
}

export function initialState(): ViewState {
  return {
    session: null,
    matrixKind: "enhanced",
    clip: [1, 99],
    selection: null,
    metrics: null,
    matches: [],
    acceptedCount: 0,
    selectedQuery: null,
    prCurves: new Map(),
    stale: false,
  };
}

export function applySession(state: ViewState, session: SessionInfo): void {
  state.session = session;
  state.selection = session.selection;
  state.metrics = session.metrics;
}

export function applyReselect(state: ViewState, resp: ReselectResponse): void {
  state.selection = resp.selection;
  state.metrics = resp.metrics;
  state.matches = resp.matches;
  state.acceptedCount = resp.accepted_count;
  state.stale = false;
}

export function markStale(state: ViewState): void {
  state.stale = true;
}

/** Slider geometry, derived from the observed strengths (or uniqueness
 * values) in the last response; a display transform, not selection math. */
export function sliderRange(state: ViewState): [number, number] {
  const sel = state.selection;
  const pick = (m: MatchEntry) =>
    sel?.method === "windowed_uniqueness" ? m.uniqueness : m.strength;
  const observed = state.matches
    .map(pick)
    .filter((v): v is number => v !== null && v !== undefined);
  if (observed.length === 0) {
    return sel?.method === "windowed_uniqueness" ? [1, 2] : [0, 1];
  }
  return [Math.min(...observed), Math.max(...observed)];
}

/** 4-decimal readout of the last service metrics, rendered verbatim. */
export function metricsReadout(metrics: MetricsPayload | null): string {
  if (!metrics) return "no ground truth loaded";
  const fmt = (x: number) => x.toFixed(4);
  return `P ${fmt(metrics.precision)}  R ${fmt(metrics.recall)}  F1 ${fmt(metrics.f1)}`;
}

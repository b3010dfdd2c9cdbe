import type { ApiClient } from "./api";
import type { MatchDetail, TrajectoryCell } from "./types";

export interface FramePair {
  queryIndex: number;
  referenceIndex: number | null;
  queryUrl: string;
  referenceUrl: string | null;
}

export interface MatchStrip {
  query: number;
  accepted: boolean | null; // null when the query has no proposal
  pairs: FramePair[];
  trajectory: TrajectoryCell[];
  score: number | null;
  uniqueness: number | null;
}

/** Side-by-side sequence strip model: query frames aligned with reference
 * frames offset by the proposal. Pure data; rendering stays trivial. */
export function buildMatchStrip(detail: MatchDetail, api: ApiClient): MatchStrip {
  const proposal = detail.proposal;
  const offset = proposal ? proposal.reference - detail.query : null;
  const referenceSet = new Set(detail.context.reference_indices);
  const pairs: FramePair[] = detail.context.query_indices.map((q) => {
    const ref = offset === null ? null : q + offset;
    const refValid = ref !== null && referenceSet.has(ref);
    return {
      queryIndex: q,
      referenceIndex: refValid ? ref : null,
      queryUrl: api.imageUrl("query", q),
      referenceUrl: refValid ? api.imageUrl("reference", ref) : null,
    };
  });
  return {
    query: detail.query,
    accepted: proposal ? proposal.accepted : null,
    pairs,
    trajectory: detail.trajectory,
    score: proposal ? proposal.score : null,
    uniqueness: proposal ? proposal.uniqueness : null,
  };
}

/** Crop window (in matrix cells) around a trajectory for the zoomed view. */
export function trajectoryCropWindow(
  cells: TrajectoryCell[],
  n: number,
  m: number,
  margin = 4,
): { r0: number; r1: number; q0: number; q1: number } | null {
  if (cells.length === 0) return null;
  const rs = cells.map((c) => c.r);
  const qs = cells.map((c) => c.q);
  return {
    r0: Math.max(0, Math.min(...rs) - margin),
    r1: Math.min(n, Math.max(...rs) + margin + 1),
    q0: Math.max(0, Math.min(...qs) - margin),
    q1: Math.min(m, Math.max(...qs) + margin + 1),
  };
}

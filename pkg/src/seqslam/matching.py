"""Match proposals and the two selection methods.

Every query with at least one valid score cell yields one proposal: its
best-oriented reference.  Selection then keeps proposals either by score
threshold or by windowed uniqueness.  Both filters operate on *strengths*,
a single larger-is-better nonnegative scale: the score itself for
higher-is-better matrices, and (column max - score) for lower-is-better
matrices.  The per-column shift makes the uniqueness ratio well defined for
signed trajectory scores.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .search import HIGHER_IS_BETTER, ScoreMatrix

SELECTION_METHODS = ("score_threshold", "windowed_uniqueness")


@dataclass(frozen=True)
class SelectionConfig:
    method: str = "score_threshold"
    lam: float = 0.0  # strength threshold; proposals with strength >= lam are kept
    mu: float = 1.0  # uniqueness threshold; kept when uniqueness > mu (strict)
    r_window: int = 10  # exclusion half-width around the best reference

    def __post_init__(self):
        if self.method not in SELECTION_METHODS:
            raise ValueError(
                f"unknown selection method {self.method!r}, expected one of {SELECTION_METHODS}"
            )
        if self.mu < 1:
            raise ValueError("mu must be >= 1")
        if self.r_window < 1:
            raise ValueError("r_window must be >= 1")


@dataclass
class MatchProposal:
    query: int
    reference: int
    score: float
    strength: float
    uniqueness: float | None = None


@dataclass
class MatchSet:
    proposals: list[MatchProposal]
    accepted: list[bool] = field(default_factory=list)

    def accepted_proposals(self) -> list[MatchProposal]:
        return [p for p, keep in zip(self.proposals, self.accepted) if keep]


def _strength_grid(s: ScoreMatrix) -> np.ndarray:
    """Per-cell strengths; invalid cells become -inf."""
    masked = np.where(s.valid, s.scores, -np.inf)
    if s.orientation == HIGHER_IS_BETTER:
        return masked
    col_max = masked.max(axis=0, keepdims=True)  # -inf for all-invalid columns
    out = np.where(s.valid, col_max - s.scores, -np.inf)
    return out


def proposals_from_scores(s: ScoreMatrix) -> list[MatchProposal]:
    """One best-reference proposal per query column that has any valid cell.

    Ties break toward the smallest reference index.
    """
    if not s.valid.any():
        raise ValueError("score matrix has no valid cells")
    has_valid = s.valid.any(axis=0)
    if s.orientation == HIGHER_IS_BETTER:
        best_ref = np.where(s.valid, s.scores, -np.inf).argmax(axis=0)
    else:
        best_ref = np.where(s.valid, s.scores, np.inf).argmin(axis=0)
    strengths = _strength_grid(s)
    proposals = []
    for q in np.nonzero(has_valid)[0]:
        r = int(best_ref[q])
        proposals.append(
            MatchProposal(
                query=int(q),
                reference=r,
                score=float(s.scores[r, q]),
                strength=float(strengths[r, q]),
            )
        )
    return proposals


def select_by_score_threshold(
    proposals: list[MatchProposal], s: ScoreMatrix, lam: float
) -> MatchSet:
    """Keep proposals whose strength is >= lam (inclusive)."""
    del s  # strengths are precomputed on the proposals; kept for interface parity
    return MatchSet(
        proposals=list(proposals), accepted=[p.strength >= lam for p in proposals]
    )


def uniqueness_score(
    column: np.ndarray,
    valid: np.ndarray,
    best: int,
    r_window: int,
    orientation: str,
) -> float | None:
    """mu1/mu2: best strength over the best valid strength outside the window.

    Undefined (None) when no valid cell lies outside |r - best| <= r_window
    or when the best competitor has zero strength.
    """
    column = np.asarray(column, dtype=np.float64)
    valid = np.asarray(valid, dtype=bool)
    if not valid[best]:
        raise ValueError("best index must be a valid cell")
    if orientation == HIGHER_IS_BETTER:
        strengths = np.where(valid, column, -np.inf)
    else:
        masked = np.where(valid, column, -np.inf)
        strengths = np.where(valid, masked.max() - column, -np.inf)
    mu1 = strengths[best]
    outside = valid & (np.abs(np.arange(column.shape[0]) - best) > r_window)
    if not outside.any():
        return None
    mu2 = strengths[outside].max()
    if mu2 == 0.0:
        return None
    return float(mu1 / mu2)


def attach_uniqueness(
    proposals: list[MatchProposal], s: ScoreMatrix, r_window: int
) -> None:
    """Compute and record the uniqueness score on every proposal (None if undefined).

    Vectorized over queries with prefix/suffix running maxima; equals
    uniqueness_score on each column.
    """
    strengths = _strength_grid(s)
    n = s.n
    prefix = np.maximum.accumulate(strengths, axis=0)
    suffix = np.maximum.accumulate(strengths[::-1], axis=0)[::-1]
    for p in proposals:
        lo = p.reference - r_window - 1
        hi = p.reference + r_window + 1
        mu2 = -np.inf
        if lo >= 0:
            mu2 = max(mu2, prefix[lo, p.query])
        if hi < n:
            mu2 = max(mu2, suffix[hi, p.query])
        if mu2 == -np.inf or mu2 == 0.0:
            p.uniqueness = None
        else:
            p.uniqueness = float(strengths[p.reference, p.query] / mu2)


def select_by_uniqueness(
    proposals: list[MatchProposal], s: ScoreMatrix, mu: float, r_window: int
) -> MatchSet:
    """Keep proposals with uniqueness strictly above mu; undefined ones are dropped."""
    attach_uniqueness(proposals, s, r_window)
    return MatchSet(
        proposals=list(proposals),
        accepted=[p.uniqueness is not None and p.uniqueness > mu for p in proposals],
    )


def apply_selection(proposals: list[MatchProposal], s: ScoreMatrix, cfg: SelectionConfig) -> MatchSet:
    if cfg.method == "score_threshold":
        return select_by_score_threshold(proposals, s, cfg.lam)
    return select_by_uniqueness(proposals, s, cfg.mu, cfg.r_window)


def matchset_to_csv(matches: MatchSet) -> str:
    """CSV export: query_index,reference_index,strength,uniqueness,accepted."""
    buf = io.StringIO()
    buf.write("query_index,reference_index,strength,uniqueness,accepted\n")
    for p, keep in zip(matches.proposals, matches.accepted):
        unique = "" if p.uniqueness is None else repr(p.uniqueness)
        buf.write(f"{p.query},{p.reference},{p.strength!r},{unique},{str(keep).lower()}\n")
    return buf.getvalue()

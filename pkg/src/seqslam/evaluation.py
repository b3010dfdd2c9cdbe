"""Precision/recall/F1 scoring, PR curves, and threshold auto-optimization.

Conventions: precision of an empty selection is 1.0 (anchors the reject-all
end of a PR curve); recall's denominator is the number of queries that have
ground truth, switchable to all queries for callers that want the stricter
reading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import GroundTruth
from .matching import (
    MatchProposal,
    MatchSet,
    SelectionConfig,
    attach_uniqueness,
    select_by_score_threshold,
    select_by_uniqueness,
)
from .search import ScoreMatrix

OPTIMIZE_TARGETS = ("precision", "recall", "f1")
RECALL_DENOMINATORS = ("eligible", "all")


@dataclass(frozen=True)
class Metrics:
    true_positives: int
    false_positives: int
    selected_count: int
    eligible_count: int
    precision: float
    recall: float
    f1: float


def _build_metrics(tp: int, fp: int, selected: int, eligible: int, recall_denom: int) -> Metrics:
    precision = tp / selected if selected > 0 else 1.0
    recall = tp / recall_denom if recall_denom > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return Metrics(
        true_positives=tp,
        false_positives=fp,
        selected_count=selected,
        eligible_count=eligible,
        precision=precision,
        recall=recall,
        f1=f1,
    )


def evaluate_matches(
    matches: MatchSet, gt: GroundTruth, recall_denominator: str = "eligible"
) -> Metrics:
    """Count accepted proposals against ground truth within its tolerance."""
    if recall_denominator not in RECALL_DENOMINATORS:
        raise ValueError(f"recall_denominator must be one of {RECALL_DENOMINATORS}")
    tp = 0
    selected = 0
    for p, keep in zip(matches.proposals, matches.accepted):
        if not keep:
            continue
        selected += 1
        expected = int(gt.expected[p.query])
        if expected >= 0 and abs(p.reference - expected) <= gt.tolerance:
            tp += 1
    eligible = gt.eligible_count
    denom = eligible if recall_denominator == "eligible" else gt.num_queries
    return _build_metrics(tp, selected - tp, selected, eligible, denom)


@dataclass(frozen=True)
class PRPoint:
    threshold: float
    metrics: Metrics

    @property
    def precision(self) -> float:
        return self.metrics.precision

    @property
    def recall(self) -> float:
        return self.metrics.recall

    @property
    def f1(self) -> float:
        return self.metrics.f1


@dataclass(frozen=True)
class PRCurve:
    method: str
    points: tuple[PRPoint, ...]


def candidate_thresholds(
    proposals: list[MatchProposal], s: ScoreMatrix, sel: SelectionConfig
) -> list[float]:
    """Achievable operating points for the configured selection method.

    Thresholds come from the observed strength (or uniqueness) values, each
    perturbed where needed so it acts as an inclusive cut, plus one reject-all
    endpoint. The list is strictly increasing.
    """
    if not proposals:
        raise ValueError("no proposals to derive thresholds from")
    if sel.method == "score_threshold":
        values = sorted({p.strength for p in proposals})
        return values + [float(np.nextafter(values[-1], math.inf))]
    attach_uniqueness(proposals, s, sel.r_window)
    values = sorted({p.uniqueness for p in proposals if p.uniqueness is not None})
    if not values:
        # every proposal has undefined uniqueness; only the empty selection exists
        return [1.0]
    return [float(np.nextafter(v, -math.inf)) for v in values] + [values[-1]]


def pr_curve(
    proposals: list[MatchProposal],
    s: ScoreMatrix,
    gt: GroundTruth,
    sel: SelectionConfig,
    recall_denominator: str = "eligible",
) -> PRCurve:
    """Metrics at every candidate threshold of the selection method."""
    points = []
    for threshold in candidate_thresholds(proposals, s, sel):
        if sel.method == "score_threshold":
            matches = select_by_score_threshold(proposals, s, threshold)
        else:
            matches = select_by_uniqueness(proposals, s, threshold, sel.r_window)
        points.append(
            PRPoint(threshold=threshold, metrics=evaluate_matches(matches, gt, recall_denominator))
        )
    return PRCurve(method=sel.method, points=tuple(points))


def optimize_threshold(
    proposals: list[MatchProposal],
    s: ScoreMatrix,
    gt: GroundTruth,
    sel: SelectionConfig,
    target: str = "f1",
    recall_denominator: str = "eligible",
) -> tuple[float, Metrics]:
    """Candidate threshold maximizing the target metric; ties keep the smallest
    threshold (the looser cut, which keeps more matches)."""
    if target not in OPTIMIZE_TARGETS:
        raise ValueError(f"target must be one of {OPTIMIZE_TARGETS}")
    curve = pr_curve(proposals, s, gt, sel, recall_denominator)
    best = None
    for point in curve.points:
        value = getattr(point.metrics, target)
        if best is None or value > getattr(best.metrics, target):
            best = point
    return best.threshold, best.metrics


def pr_curve_to_csv(curve: PRCurve) -> str:
    lines = ["threshold,precision,recall,f1"]
    for p in curve.points:
        lines.append(f"{p.threshold!r},{p.precision!r},{p.recall!r},{p.f1!r}")
    return "\n".join(lines) + "\n"


def write_pr_curve_svg(curve: PRCurve, path) -> None:
    """Line plot of the threshold-parameterized PR curve."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot([p.recall for p in curve.points], [p.precision for p in curve.points], marker="o")
    ax.set_xlabel("recall")
    ax.set_ylabel("precision")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(f"PR curve ({curve.method})")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)

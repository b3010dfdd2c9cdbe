"""Batch parameter sweeps over one pipeline axis with stage-level caching.

Four axes are supported: the enhancement window width, the sequence length,
and the selection threshold per search method or per selection method. For
the two threshold axes the values are fractions in [0, 1] of each method's
own achievable threshold range, because raw thresholds are not comparable
across methods (trajectory scores are signed sums, cone scores live in
[0, 1]).

Stages are rebuilt only downstream of the swept parameter; a cached sweep
row is bitwise-identical to a from-scratch run at that value.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from datetime import datetime, timezone

from .config import SWEEP_AXES, PipelineConfig, config_to_dict
from .dataset import GroundTruth, Traverse
from .diffmatrix import build_difference_matrix, enhance_matrix
from .evaluation import (
    Metrics,
    candidate_thresholds,
    evaluate_matches,
    optimize_threshold,
)
from .matching import select_by_score_threshold, select_by_uniqueness, proposals_from_scores
from .preprocess import preprocess_traverse
from .search import SEARCH_METHODS, run_search


@dataclass(frozen=True)
class SweepSpec:
    base: PipelineConfig
    axis: str
    values: tuple[float, ...]
    optimize_target: str = "f1"

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"unknown sweep axis {self.axis!r}, expected one of {SWEEP_AXES}")
        if not self.values:
            raise ValueError("sweep needs at least one value")


@dataclass(frozen=True)
class SweepRow:
    axis: str
    value: float
    method: str
    metrics: Metrics
    seconds: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    provenance: dict


def _require_int(axis: str, value: float) -> int:
    if float(value) != int(value):
        raise ValueError(f"invalid {axis} value {value!r}: must be an integer")
    return int(value)


def _validate_values(spec: SweepSpec, n: int, m: int) -> list:
    out = []
    for value in spec.values:
        if spec.axis == "norm_width":
            v = _require_int(spec.axis, value)
            if v < 2:
                raise ValueError(f"invalid norm_width value {v}: minimum 2")
            if v > n:
                raise ValueError(f"invalid norm_width value {v}: maximum is the traverse length {n}")
        elif spec.axis == "seq_length":
            v = _require_int(spec.axis, value)
            if v < 2:
                raise ValueError(f"invalid seq_length value {v}: minimum 2")
            if v > min(n, m):
                raise ValueError(
                    f"invalid seq_length value {v}: longer than the shorter traverse ({min(n, m)})"
                )
        else:
            v = float(value)
            if not 0.0 <= v <= 1.0:
                raise ValueError(
                    f"invalid {spec.axis} value {v!r}: thresholds are fractions in [0, 1] "
                    "of each method's achievable range"
                )
        out.append(v)
    return out


def _threshold_at_fraction(thresholds: list[float], fraction: float) -> float:
    lo, hi = thresholds[0], thresholds[-1]
    return lo + fraction * (hi - lo)


def run_sweep(
    spec: SweepSpec,
    ref: Traverse,
    query: Traverse,
    gt: GroundTruth,
    workers: int = 1,
) -> SweepResult:
    """Run the sweep, reusing every stage upstream of the swept parameter."""
    base = spec.base
    pre_ref = preprocess_traverse(ref, base.preprocess)
    pre_query = preprocess_traverse(query, base.preprocess)
    values = _validate_values(spec, n=len(pre_ref), m=len(pre_query))
    recall_denom = base.evaluation.recall_denominator

    diff = build_difference_matrix(pre_ref, pre_query, workers=workers)

    jobs: list[tuple[float, str]] = []  # (value, method) in output order
    runner = None

    if spec.axis == "norm_width":
        method = base.search.method

        def runner(value, _method):
            enhanced = enhance_matrix(diff, int(value))
            scores = run_search(diff, enhanced, base.search)
            proposals = proposals_from_scores(scores)
            _, metrics = optimize_threshold(
                proposals, scores, gt, base.selection, spec.optimize_target, recall_denom
            )
            return metrics

        jobs = [(v, method) for v in values]

    elif spec.axis == "seq_length":
        method = base.search.method
        enhanced = enhance_matrix(diff, base.r_norm)

        def runner(value, _method):
            search_cfg = replace(base.search, d_s=int(value))
            scores = run_search(diff, enhanced, search_cfg)
            proposals = proposals_from_scores(scores)
            _, metrics = optimize_threshold(
                proposals, scores, gt, base.selection, spec.optimize_target, recall_denom
            )
            return metrics

        jobs = [(v, method) for v in values]

    elif spec.axis == "search_method_threshold":
        enhanced = enhance_matrix(diff, base.r_norm)
        per_method = {}
        for method in SEARCH_METHODS:
            scores = run_search(diff, enhanced, replace(base.search, method=method))
            proposals = proposals_from_scores(scores)
            thresholds = candidate_thresholds(proposals, scores, base.selection)
            per_method[method] = (scores, proposals, thresholds)

        def runner(value, method):
            scores, proposals, thresholds = per_method[method]
            threshold = _threshold_at_fraction(thresholds, value)
            if base.selection.method == "score_threshold":
                matches = select_by_score_threshold(proposals, scores, threshold)
            else:
                matches = select_by_uniqueness(
                    proposals, scores, threshold, base.selection.r_window
                )
            return evaluate_matches(matches, gt, recall_denom)

        jobs = [(v, method) for v in values for method in SEARCH_METHODS]

    else:  # selection_method_threshold
        enhanced = enhance_matrix(diff, base.r_norm)
        scores = run_search(diff, enhanced, base.search)
        proposals = proposals_from_scores(scores)
        sel_methods = ("score_threshold", "windowed_uniqueness")
        per_method = {}
        for method in sel_methods:
            sel = replace(base.selection, method=method)
            per_method[method] = candidate_thresholds(proposals, scores, sel)

        def runner(value, method):
            threshold = _threshold_at_fraction(per_method[method], value)
            if method == "score_threshold":
                matches = select_by_score_threshold(proposals, scores, threshold)
            else:
                matches = select_by_uniqueness(
                    proposals, scores, threshold, base.selection.r_window
                )
            return evaluate_matches(matches, gt, recall_denom)

        jobs = [(v, method) for v in values for method in sel_methods]

    def timed(job):
        value, method = job
        start = time.perf_counter()
        metrics = runner(value, method)
        return SweepRow(
            axis=spec.axis,
            value=value,
            method=method,
            metrics=metrics,
            seconds=time.perf_counter() - start,
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(timed, jobs))  # map preserves job order
    else:
        rows = tuple(timed(job) for job in jobs)

    provenance = {
        "created": datetime.now(timezone.utc).isoformat(),
        "axis": spec.axis,
        "values": [row.value for row in rows],
        "optimize_target": spec.optimize_target,
        "config": config_to_dict(base),
        "inputs": {
            "reference": ref.fingerprint(),
            "query": query.fingerprint(),
            "ground_truth": gt.fingerprint(),
        },
    }
    return SweepResult(rows=rows, provenance=provenance)


def sweep_to_csv(result: SweepResult) -> str:
    lines = ["axis,value,method,precision,recall,f1,seconds"]
    for row in result.rows:
        m = row.metrics
        lines.append(
            f"{row.axis},{row.value!r},{row.method},{m.precision!r},{m.recall!r},{m.f1!r},{row.seconds!r}"
        )
    return "\n".join(lines) + "\n"

"""End-to-end pipeline driver shared by the CLI, sweep engine, and service."""

from __future__ import annotations

from dataclasses import dataclass

from .config import PipelineConfig
from .dataset import GroundTruth, Traverse, load_ground_truth, load_traverse, subsample
from .diffmatrix import DifferenceMatrix, EnhancedMatrix, build_difference_matrix, enhance_matrix
from .evaluation import Metrics, evaluate_matches
from .matching import MatchProposal, MatchSet, apply_selection, proposals_from_scores
from .preprocess import preprocess_traverse
from .search import ScoreMatrix, run_search


@dataclass
class PipelineResult:
    config: PipelineConfig
    ref_raw: Traverse
    query_raw: Traverse
    ref: Traverse
    query: Traverse
    diff: DifferenceMatrix
    enhanced: EnhancedMatrix
    scores: ScoreMatrix
    proposals: list[MatchProposal]
    matches: MatchSet
    gt: GroundTruth | None
    metrics: Metrics | None


def load_inputs(cfg: PipelineConfig) -> tuple[Traverse, Traverse, GroundTruth | None]:
    ds = cfg.dataset
    ref = subsample(load_traverse(ds.reference_dir, ds.reference_pattern), ds.reference_step)
    query = subsample(load_traverse(ds.query_dir, ds.query_pattern), ds.query_step)
    gt = None
    if ds.ground_truth is not None:
        gt = load_ground_truth(ds.ground_truth, m=len(query), n=len(ref))
    return ref, query, gt


def run_pipeline(cfg: PipelineConfig, workers: int = 1) -> PipelineResult:
    ref_raw, query_raw, gt = load_inputs(cfg)
    return run_pipeline_on(cfg, ref_raw, query_raw, gt, workers=workers)


def run_pipeline_on(
    cfg: PipelineConfig,
    ref_raw: Traverse,
    query_raw: Traverse,
    gt: GroundTruth | None,
    workers: int = 1,
) -> PipelineResult:
    """Run every stage on already-loaded traverses."""
    ref = preprocess_traverse(ref_raw, cfg.preprocess)
    query = preprocess_traverse(query_raw, cfg.preprocess)
    diff = build_difference_matrix(ref, query, workers=workers)
    enhanced = enhance_matrix(diff, cfg.r_norm, workers=workers)
    scores = run_search(diff, enhanced, cfg.search, workers=workers)
    proposals = proposals_from_scores(scores)
    matches = apply_selection(proposals, scores, cfg.selection)
    metrics = None
    if gt is not None:
        metrics = evaluate_matches(matches, gt, cfg.evaluation.recall_denominator)
    return PipelineResult(
        config=cfg,
        ref_raw=ref_raw,
        query_raw=query_raw,
        ref=ref,
        query=query,
        diff=diff,
        enhanced=enhanced,
        scores=scores,
        proposals=proposals,
        matches=matches,
        gt=gt,
        metrics=metrics,
    )

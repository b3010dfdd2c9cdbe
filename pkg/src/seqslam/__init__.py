"""Sequence-based visual place recognition toolkit.

Pipeline stages: traverse loading -> preprocessing -> difference matrix ->
local contrast enhancement -> sequence search (trajectory / cone / hybrid)
-> match selection (score threshold / windowed uniqueness) -> evaluation.
Plus a sweep engine, threshold auto-optimization, a CLI, and an HTTP
service backing the interactive explorer.
"""

from .dataset import GroundTruth, Traverse, load_ground_truth, load_traverse, subsample
from .diffmatrix import (
    DifferenceMatrix,
    EnhancedMatrix,
    build_difference_matrix,
    enhance_matrix,
)
from .evaluation import (
    Metrics,
    PRCurve,
    evaluate_matches,
    optimize_threshold,
    pr_curve,
)
from .matching import (
    MatchProposal,
    MatchSet,
    SelectionConfig,
    apply_selection,
    proposals_from_scores,
    select_by_score_threshold,
    select_by_uniqueness,
    uniqueness_score,
)
from .preprocess import (
    CropRect,
    PreprocessConfig,
    crop_resize,
    patch_normalize,
    preprocess_traverse,
    to_grayscale,
)
from .search import (
    ScoreMatrix,
    SearchConfig,
    cone_cells,
    cone_search,
    hybrid_search,
    run_search,
    trajectory_score,
    trajectory_search,
    velocity_grid,
)
from .sweep import SweepResult, SweepSpec, run_sweep

__all__ = [
    "CropRect",
    "DifferenceMatrix",
    "EnhancedMatrix",
    "GroundTruth",
    "MatchProposal",
    "MatchSet",
    "Metrics",
    "PRCurve",
    "PreprocessConfig",
    "ScoreMatrix",
    "SearchConfig",
    "SelectionConfig",
    "SweepResult",
    "SweepSpec",
    "Traverse",
    "apply_selection",
    "build_difference_matrix",
    "cone_cells",
    "cone_search",
    "crop_resize",
    "enhance_matrix",
    "evaluate_matches",
    "hybrid_search",
    "load_ground_truth",
    "load_traverse",
    "optimize_threshold",
    "patch_normalize",
    "pr_curve",
    "preprocess_traverse",
    "proposals_from_scores",
    "run_search",
    "run_sweep",
    "select_by_score_threshold",
    "select_by_uniqueness",
    "subsample",
    "to_grayscale",
    "trajectory_score",
    "trajectory_search",
    "uniqueness_score",
    "velocity_grid",
]

__version__ = "0.1.0"

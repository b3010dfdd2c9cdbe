"""Local sequence search: trajectory, cone, and hybrid scoring.

All three methods score every (reference r, query q) pairing. Trajectory
search sums enhanced-matrix cells along constant-slope lines and keeps the
minimum; cone search counts per-column global best matches of the raw
matrix inside slope-bounded cones; hybrid draws trajectories through the
cone's global best matches. Sequences span d_s query frames, split as
floor(d_s/2) behind the query and the remainder ahead.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .diffmatrix import DifferenceMatrix, EnhancedMatrix
from .numerics import round_half_away

LOWER_IS_BETTER = "lower_is_better"
HIGHER_IS_BETTER = "higher_is_better"

SEARCH_METHODS = ("trajectory", "cone", "hybrid")

# Slack when enumerating integer rows against slope bounds; candidates are
# re-checked with the exact predicate afterwards, so this only guards against
# products like 0.8 * 5 landing a hair above 4.0.
_SLOPE_EPS = 1e-9


@dataclass(frozen=True)
class SearchConfig:
    method: str = "trajectory"
    d_s: int = 10
    v_min: float = 0.8
    v_max: float = 1.2
    v_step: float = 0.1

    def __post_init__(self):
        if self.method not in SEARCH_METHODS:
            raise ValueError(f"unknown search method {self.method!r}, expected one of {SEARCH_METHODS}")
        if self.d_s < 2:
            raise ValueError("d_s must be >= 2")
        if not 0 < self.v_min <= self.v_max:
            raise ValueError("need 0 < v_min <= v_max")
        if self.v_step <= 0:
            raise ValueError("v_step must be > 0")


@dataclass(frozen=True)
class ScoreMatrix:
    """Best sequence score per (r, q) cell plus a validity mask.

    Scores at invalid cells are stored as 0 and carry no meaning; invalid
    cells are never selected as proposals.
    """

    scores: np.ndarray  # (n, m) float64
    valid: np.ndarray  # (n, m) bool
    orientation: str

    def __post_init__(self):
        if self.orientation not in (LOWER_IS_BETTER, HIGHER_IS_BETTER):
            raise ValueError(f"bad orientation {self.orientation!r}")

    @property
    def n(self) -> int:
        return int(self.scores.shape[0])

    @property
    def m(self) -> int:
        return int(self.scores.shape[1])


def velocity_grid(cfg: SearchConfig) -> list[float]:
    """Slopes v_min, v_min + v_step, ...; v_max is always included."""
    span = cfg.v_max - cfg.v_min
    steps = int(math.floor(span / cfg.v_step + _SLOPE_EPS))
    grid = [cfg.v_min + i * cfg.v_step for i in range(steps + 1)]
    if abs(grid[-1] - cfg.v_max) <= _SLOPE_EPS * max(1.0, abs(cfg.v_max)):
        grid[-1] = cfg.v_max
    elif grid[-1] < cfg.v_max:
        grid.append(cfg.v_max)
    return grid


def _sequence_offsets(d_s: int) -> np.ndarray:
    return np.arange(d_s) - d_s // 2


def trajectory_score(e: EnhancedMatrix, r: int, q: int, v: float, d_s: int) -> float | None:
    """Sum of enhanced values along the slope-v line through (r, q).

    Cells are summed in ascending offset order. Returns None when any of the
    d_s cells falls outside the matrix (sequences are never truncated, so
    every defined score sums the same number of cells).
    """
    n, m = e.values.shape
    offs = _sequence_offsets(d_s)
    rows = round_half_away(r + v * offs).astype(np.int64)
    cols = q + offs
    if rows.min() < 0 or rows.max() >= n or cols.min() < 0 or cols.max() >= m:
        return None
    total = 0.0
    for rr, cc in zip(rows, cols):
        total += e.values[rr, cc]
    return total


def _trajectory_matrices(values: np.ndarray, v: float, d_s: int) -> tuple[np.ndarray, np.ndarray]:
    """All-cell trajectory sums at slope v: (n, m) scores and validity.

    Accumulates in ascending offset order so results match trajectory_score
    bitwise.
    """
    n, m = values.shape
    offs = _sequence_offsets(d_s)
    r_idx = np.arange(n)[:, None]
    rows = round_half_away(r_idx + v * offs[None, :]).astype(np.int64)  # (n, d_s)
    rows_ok = ((rows >= 0) & (rows < n)).all(axis=1)
    q_idx = np.arange(m)
    cols_ok = (q_idx + offs[0] >= 0) & (q_idx + offs[-1] < m)
    rows_c = np.clip(rows, 0, n - 1)
    scores = np.zeros((n, m), dtype=np.float64)
    for k, t in enumerate(offs):
        cols = np.clip(q_idx + t, 0, m - 1)
        scores += values[rows_c[:, k]][:, cols]
    valid = rows_ok[:, None] & cols_ok[None, :]
    return scores, valid


def _masked_min(acc_scores, acc_valid, scores, valid):
    cand = np.where(valid, scores, np.inf)
    return np.minimum(acc_scores, cand), acc_valid | valid


def trajectory_search(e: EnhancedMatrix, cfg: SearchConfig, workers: int = 1) -> ScoreMatrix:
    """Minimum trajectory score over the velocity grid for every cell."""
    grid = velocity_grid(cfg)

    def per_velocity(v: float):
        return _trajectory_matrices(e.values, v, cfg.d_s)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(per_velocity, grid))
    else:
        results = [per_velocity(v) for v in grid]

    n, m = e.values.shape
    best = np.full((n, m), np.inf)
    any_valid = np.zeros((n, m), dtype=bool)
    for scores, valid in results:
        best, any_valid = _masked_min(best, any_valid, scores, valid)
    return ScoreMatrix(
        scores=np.where(any_valid, best, 0.0), valid=any_valid, orientation=LOWER_IS_BETTER
    )


def cone_offsets(cfg: SearchConfig) -> list[tuple[int, int]]:
    """Translation-invariant (dr, dq) offsets of the search cones.

    dq spans the same window as a sequence (floor(d_s/2) behind, the rest
    ahead, never 0); dr covers every integer row whose slope dr/dq lies in
    [v_min, v_max]. The slope bound applies symmetrically behind and ahead.
    """
    half = cfg.d_s // 2
    offsets = []
    for dq in range(-half, cfg.d_s - half):
        if dq == 0:
            continue
        lo, hi = sorted((cfg.v_min * dq, cfg.v_max * dq))
        for dr in range(math.ceil(lo - _SLOPE_EPS), math.floor(hi + _SLOPE_EPS) + 1):
            if cfg.v_min <= dr / dq <= cfg.v_max:
                offsets.append((dr, dq))
    return offsets


def cone_cells(r: int, q: int, cfg: SearchConfig, n: int, m: int) -> list[tuple[int, int]]:
    """In-bounds cone cells around (r, q), ordered by (q', r')."""
    cells = [
        (r + dr, q + dq)
        for dr, dq in sorted(cone_offsets(cfg), key=lambda o: (o[1], o[0]))
        if 0 <= r + dr < n and 0 <= q + dq < m
    ]
    return cells


def global_best_mask(d: DifferenceMatrix) -> np.ndarray:
    """True where a cell is a minimum of its query column (all ties count)."""
    return d.values == d.values.min(axis=0, keepdims=True)


def _shift_window(n: int, m: int, dr: int, dq: int):
    """Index ranges so that dst[r0:r1, c0:c1] aligns with src shifted by (dr, dq)."""
    r0, r1 = max(0, -dr), min(n, n - dr)
    c0, c1 = max(0, -dq), min(m, m - dq)
    return r0, r1, c0, c1


def cone_search(d: DifferenceMatrix, cfg: SearchConfig, workers: int = 1) -> ScoreMatrix:
    """Prevalence of global best matches inside the cones, in [0, 1].

    Every score is count/d_s capped at 1; all cells are valid (an empty cone
    scores 0, it is not undefined).
    """
    best = global_best_mask(d)
    n, m = d.values.shape
    counts = np.zeros((n, m), dtype=np.float64)
    for dr, dq in cone_offsets(cfg):
        r0, r1, c0, c1 = _shift_window(n, m, dr, dq)
        if r0 < r1 and c0 < c1:
            counts[r0:r1, c0:c1] += best[r0 + dr : r1 + dr, c0 + dq : c1 + dq]
    scores = np.minimum(1.0, counts / cfg.d_s)
    return ScoreMatrix(
        scores=scores, valid=np.ones((n, m), dtype=bool), orientation=HIGHER_IS_BETTER
    )


def hybrid_search(
    d: DifferenceMatrix, e: EnhancedMatrix, cfg: SearchConfig, workers: int = 1
) -> ScoreMatrix:
    """Trajectories drawn through each global best match found in the cones.

    The slope toward each best match is clamped into [v_min, v_max]; the cell
    score is the minimum defined trajectory score, and cells with no global
    best in their cones (or no in-bounds trajectory) are invalid.
    """
    if d.values.shape != e.values.shape:
        raise ValueError("difference and enhanced matrices must have equal dimensions")
    best = global_best_mask(d)
    n, m = d.values.shape
    offsets = cone_offsets(cfg)
    velocities = sorted({min(max(dr / dq, cfg.v_min), cfg.v_max) for dr, dq in offsets})

    def per_velocity(v: float):
        return _trajectory_matrices(e.values, v, cfg.d_s)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            traj = dict(zip(velocities, pool.map(per_velocity, velocities)))
    else:
        traj = {v: per_velocity(v) for v in velocities}

    acc = np.full((n, m), np.inf)
    any_valid = np.zeros((n, m), dtype=bool)
    for dr, dq in offsets:
        v = min(max(dr / dq, cfg.v_min), cfg.v_max)
        scores, defined = traj[v]
        hit = np.zeros((n, m), dtype=bool)
        r0, r1, c0, c1 = _shift_window(n, m, dr, dq)
        if r0 < r1 and c0 < c1:
            hit[r0:r1, c0:c1] = best[r0 + dr : r1 + dr, c0 + dq : c1 + dq]
        acc, any_valid = _masked_min(acc, any_valid, scores, hit & defined)
    return ScoreMatrix(
        scores=np.where(any_valid, acc, 0.0), valid=any_valid, orientation=LOWER_IS_BETTER
    )


def run_search(
    d: DifferenceMatrix, e: EnhancedMatrix, cfg: SearchConfig, workers: int = 1
) -> ScoreMatrix:
    """Dispatch to the configured search method."""
    if cfg.method == "trajectory":
        return trajectory_search(e, cfg, workers=workers)
    if cfg.method == "cone":
        return cone_search(d, cfg, workers=workers)
    return hybrid_search(d, e, cfg, workers=workers)

"""The n x m difference matrix and its locally contrast-enhanced version.

Cell (r, q) holds the pixel-count-normalized sum of absolute differences
between reference frame r and query frame q. Enhancement z-scores each
query's difference vector inside a sliding window of reference indices so
that locally-best matches stand out regardless of absolute difference level.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dataset import Traverse


@dataclass(frozen=True)
class DifferenceMatrix:
    values: np.ndarray  # (n, m) float64, nonnegative

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def m(self) -> int:
        return int(self.values.shape[1])


@dataclass(frozen=True)
class EnhancedMatrix:
    values: np.ndarray  # (n, m) float64 windowed z-scores, finite everywhere
    r_norm: int

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def m(self) -> int:
        return int(self.values.shape[1])


def _check_uniform_dims(ref: Traverse, query: Traverse) -> tuple[int, int]:
    base = ref.images[0].shape
    base_id = ref.ids[0]
    for t in (ref, query):
        for name, img in zip(t.ids, t.images):
            if img.shape != base:
                raise ValueError(
                    f"image dimensions differ: {name} is {img.shape[1]}x{img.shape[0]}, "
                    f"expected {base[1]}x{base[0]} (from {base_id})"
                )
    return base  # (H, W)


def _column_chunks(m: int, workers: int) -> list[tuple[int, int]]:
    chunk = max(1, -(-m // max(1, workers)))
    return [(j, min(j + chunk, m)) for j in range(0, m, chunk)]


def build_difference_matrix(ref: Traverse, query: Traverse, workers: int = 1) -> DifferenceMatrix:
    """Pairwise mean absolute difference between all reference/query frames."""
    h, w = _check_uniform_dims(ref, query)
    area = float(h * w)
    refs = np.ascontiguousarray([img.reshape(-1) for img in ref.images])
    queries = np.ascontiguousarray([img.reshape(-1) for img in query.images])
    n, m = len(ref), len(query)
    out = np.empty((n, m), dtype=np.float64)

    def fill(j0: int, j1: int) -> None:
        for j in range(j0, j1):
            out[:, j] = np.abs(refs - queries[j]).sum(axis=1) / area

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda span: fill(*span), _column_chunks(m, workers)))
    else:
        fill(0, m)
    return DifferenceMatrix(values=out)


def _window_starts(n: int, r_norm: int) -> tuple[int, np.ndarray]:
    """Window length and per-row start indices for the sliding normalization.

    Every window spans exactly min(r_norm, n) rows with floor(r_norm/2) rows
    leading row r; near the column ends the window slides to stay inside
    [0, n) rather than shrinking, so r_norm >= n degrades to whole-column
    normalization.
    """
    win = min(r_norm, n)
    starts = np.clip(np.arange(n) - r_norm // 2, 0, n - win)
    return win, starts


def enhance_matrix(d: DifferenceMatrix, r_norm: int, workers: int = 1) -> EnhancedMatrix:
    """Windowed z-score of each query column across reference indices."""
    if r_norm < 2:
        raise ValueError(f"r_norm must be >= 2, got {r_norm}")
    values = d.values
    n, m = values.shape
    win, starts = _window_starts(n, r_norm)
    out = np.empty_like(values)

    def fill(j0: int, j1: int) -> None:
        block = values[:, j0:j1]
        for s in range(0, n - win + 1):
            rows = np.nonzero(starts == s)[0]
            if rows.size == 0:
                continue
            window = block[s : s + win]
            mean = window.mean(axis=0)
            std = window.std(axis=0)  # population
            centered = block[rows] - mean
            safe = np.where(std == 0.0, 1.0, std)
            out[rows, j0:j1] = np.where(std == 0.0, 0.0, centered / safe)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda span: fill(*span), _column_chunks(m, workers)))
    else:
        fill(0, m)
    return EnhancedMatrix(values=out, r_norm=r_norm)

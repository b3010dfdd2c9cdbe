"""Shared numeric conventions used across the pipeline.

Every statistic in the toolkit uses the population (divide-by-count)
standard deviation, and every fractional row index is rounded
half-away-from-zero. Both conventions are fixed here so that image patch
normalization, difference-vector enhancement, and trajectory rasterization
cannot drift apart.
"""

from __future__ import annotations

import numpy as np


def population_std(values: np.ndarray, axis=None) -> np.ndarray | float:
    """Population standard deviation (ddof=0)."""
    return np.std(values, axis=axis, ddof=0)


def round_half_away(x):
    """Round to nearest integer, halves away from zero.

    Works elementwise on arrays; returns floats (callers cast to int once
    they have range-checked the values).
    """
    x = np.asarray(x, dtype=float)
    return np.where(x >= 0.0, np.floor(x + 0.5), np.ceil(x - 0.5))

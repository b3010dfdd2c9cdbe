"""Image preprocessing: grayscale, crop/downsample, patch normalization.

The output representation is a small patch-normalized image: values are
unclipped reals with zero mean and unit (population) deviation inside each
patch, which is what makes the downstream sum-of-absolute-differences
robust to local lighting changes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dataset import Traverse
from .numerics import population_std

# Soft ceiling on target resolution: the representation is meant to be tiny,
# and difference-matrix cost grows linearly with pixel count.
PIXEL_BUDGET = 10_000


@dataclass(frozen=True)
class CropRect:
    """Crop window in source pixels; ``right``/``bottom`` are exclusive."""

    left: int
    top: int
    right: int
    bottom: int

    def check_bounds(self, width: int, height: int) -> None:
        if self.left >= self.right or self.top >= self.bottom:
            raise ValueError(f"empty crop rectangle {self}")
        if self.left < 0 or self.top < 0 or self.right > width or self.bottom > height:
            raise ValueError(f"crop {self} out of bounds for {width}x{height} image")


@dataclass(frozen=True)
class PreprocessConfig:
    target_width: int = 64
    target_height: int = 32
    patch_size: int = 8
    crop: CropRect | None = None

    def __post_init__(self):
        if self.target_width < 1 or self.target_height < 1:
            raise ValueError("target dimensions must be >= 1")
        if self.patch_size < 1:
            raise ValueError("patch_size must be >= 1")
        if self.target_width * self.target_height > PIXEL_BUDGET:
            warnings.warn(
                f"target resolution {self.target_width}x{self.target_height} exceeds "
                f"{PIXEL_BUDGET} pixels; the representation is meant to be a few thousand",
                stacklevel=2,
            )


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Reduce a (H, W) or (H, W, 3/4) array to float64 luma (0.299R + 0.587G + 0.114B)."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        return arr.copy()
    if arr.ndim == 3 and arr.shape[2] in (3, 4):
        return arr[..., 0] * 0.299 + arr[..., 1] * 0.587 + arr[..., 2] * 0.114
    raise ValueError(f"expected (H, W) or (H, W, 3) image, got shape {arr.shape}")


def _overlap_weights(src: int, dst: int) -> np.ndarray:
    """(dst, src) matrix whose rows box-average source pixels onto output pixels.

    Output pixel i covers the source interval [i*src/dst, (i+1)*src/dst); each
    source pixel is weighted by its overlap with that interval.
    """
    w = np.zeros((dst, src))
    scale = src / dst
    for i in range(dst):
        lo = i * scale
        hi = (i + 1) * scale
        for j in range(int(math.floor(lo)), min(int(math.ceil(hi)), src)):
            w[i, j] = min(hi, j + 1.0) - max(lo, float(j))
        w[i] /= scale
    return w


def crop_resize(img: np.ndarray, cfg: PreprocessConfig) -> np.ndarray:
    """Optionally crop, then box-resample to the configured target resolution."""
    arr = np.asarray(img, dtype=np.float64)
    h, w = arr.shape
    if cfg.crop is not None:
        cfg.crop.check_bounds(w, h)
        arr = arr[cfg.crop.top : cfg.crop.bottom, cfg.crop.left : cfg.crop.right]
        h, w = arr.shape
    if (w, h) == (cfg.target_width, cfg.target_height):
        return arr.copy()
    w_rows = _overlap_weights(h, cfg.target_height)
    w_cols = _overlap_weights(w, cfg.target_width)
    return w_rows @ arr @ w_cols.T


def patch_normalize(img: np.ndarray, patch_size: int) -> np.ndarray:
    """Z-score each patch_size x patch_size tile (population std; flat tiles -> 0).

    Edge tiles smaller than the patch size are normalized over their actual
    pixel count rather than discarded.
    """
    if patch_size < 1:
        raise ValueError("patch_size must be >= 1")
    arr = np.asarray(img, dtype=np.float64)
    out = np.empty_like(arr)
    h, w = arr.shape
    for top in range(0, h, patch_size):
        for left in range(0, w, patch_size):
            patch = arr[top : top + patch_size, left : left + patch_size]
            sigma = population_std(patch)
            if sigma == 0.0:
                out[top : top + patch_size, left : left + patch_size] = 0.0
            else:
                out[top : top + patch_size, left : left + patch_size] = (
                    patch - patch.mean()
                ) / sigma
    return out


def preprocess_image(img: np.ndarray, cfg: PreprocessConfig) -> np.ndarray:
    return patch_normalize(crop_resize(to_grayscale(img), cfg), cfg.patch_size)


def preprocess_traverse(t: Traverse, cfg: PreprocessConfig) -> Traverse:
    """Apply grayscale -> crop/resize -> patch normalization to every frame in order."""
    images = []
    for name, img in zip(t.ids, t.images):
        try:
            images.append(preprocess_image(img, cfg))
        except Exception as err:
            raise ValueError(f"preprocessing failed for image {name}: {err}") from err
    return Traverse(images=tuple(images), ids=t.ids)

"""Synthetic traverse generation for demos, sweeps, and self-tests.

Frames are smooth random fields that evolve slowly along the sequence, so
nearby frames look alike (single-frame matching is ambiguous under noise)
while distant frames decorrelate. A query traverse is the reference plus
per-pixel Gaussian noise and a global brightness ramp drifting across the
sequence, which patch normalization is expected to absorb.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .dataset import GroundTruth, Traverse


def smooth_random_images(
    count: int,
    width: int,
    height: int,
    rng: np.random.Generator,
    components: int = 24,
    max_time_cycles: float = 8.0,
    max_space_cycles: float = 4.0,
) -> list[np.ndarray]:
    """Random low-frequency cosine mixtures over (frame, y, x), scaled to [0, 255]."""
    t = np.arange(count, dtype=float)[:, None, None]
    y = np.arange(height, dtype=float)[None, :, None]
    x = np.arange(width, dtype=float)[None, None, :]
    field = np.zeros((count, height, width))
    for _ in range(components):
        ft = rng.uniform(0.5, max_time_cycles)
        fy = rng.uniform(0.5, max_space_cycles)
        fx = rng.uniform(0.5, max_space_cycles)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        amp = rng.uniform(0.5, 1.0)
        field += amp * np.cos(
            2.0 * np.pi * (ft * t / count + fy * y / height + fx * x / width) + phase
        )
    lo, hi = field.min(), field.max()
    field = (field - lo) / (hi - lo) * 255.0
    return [field[i] for i in range(count)]


def perturb_images(
    images: list[np.ndarray],
    rng: np.random.Generator,
    noise_sigma: float = 30.0,
    ramp_amplitude: float = 30.0,
) -> list[np.ndarray]:
    """Add Gaussian pixel noise and a sequence-long brightness ramp, clipped to [0, 255]."""
    count = len(images)
    ramp = np.linspace(-ramp_amplitude, ramp_amplitude, count)
    out = []
    for i, img in enumerate(images):
        noisy = img + rng.normal(0.0, noise_sigma, size=img.shape) + ramp[i]
        out.append(np.clip(noisy, 0.0, 255.0))
    return out


def as_traverse(images: list[np.ndarray], prefix: str = "frame") -> Traverse:
    width = max(3, len(str(len(images) - 1)))
    ids = tuple(f"{prefix}_{i:0{width}d}.pgm" for i in range(len(images)))
    return Traverse(images=tuple(np.asarray(img, dtype=np.float64) for img in images), ids=ids)


def identity_ground_truth(m: int, tolerance: int = 1) -> GroundTruth:
    return GroundTruth(expected=np.arange(m, dtype=np.int64), tolerance=tolerance)


def write_traverse_pgm(directory: str | Path, t: Traverse) -> None:
    """Quantize to 8 bits and write one binary PGM per frame."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    for name, img in zip(t.ids, t.images):
        quantized = np.clip(np.rint(img), 0, 255).astype(np.uint8)
        Image.fromarray(quantized, mode="L").save(root / name)

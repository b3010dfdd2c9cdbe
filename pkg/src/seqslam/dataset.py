"""Image traverses on disk, subsampling, and frame-index ground truth.

A traverse is one ordered pass through an environment. Frames are ordered
lexicographically by filename, so sequences must use zero-padded names
(000.pgm, 001.pgm, ...). Binary 8-bit PGM (P5) is the canonical input and
is decoded bit-exactly; PNG/JPEG are accepted and reduced to 8-bit luma.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .numerics import round_half_away

# Rec. 601 luma weights, applied to color inputs at load time.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class Traverse:
    """An ordered image sequence with its source identifiers."""

    images: tuple[np.ndarray, ...]
    ids: tuple[str, ...]

    def __post_init__(self):
        if len(self.images) != len(self.ids):
            raise ValueError("images and ids must have equal length")
        if len(self.images) < 2:
            raise ValueError("too few images: a traverse needs at least 2")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate image ids in traverse")

    def __len__(self) -> int:
        return len(self.images)

    @property
    def length(self) -> int:
        return len(self.images)

    def fingerprint(self) -> str:
        """sha256 over ids and pixel data; stable across loads."""
        h = hashlib.sha256()
        for name, img in zip(self.ids, self.images):
            h.update(name.encode("utf-8"))
            h.update(str(img.shape).encode("ascii"))
            h.update(np.ascontiguousarray(img, dtype=np.float64).tobytes())
        return h.hexdigest()


@dataclass(frozen=True)
class GroundTruth:
    """Expected reference index per query (-1 = unknown) plus a frame tolerance.

    A proposal for query q is correct iff |reference - expected[q]| <= tolerance
    (inclusive on both sides).
    """

    expected: np.ndarray  # shape (m,), int64, -1 where the query has no truth
    tolerance: int

    def __post_init__(self):
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")

    @property
    def num_queries(self) -> int:
        return int(self.expected.shape[0])

    @property
    def eligible_count(self) -> int:
        return int(np.count_nonzero(self.expected >= 0))

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(str(self.tolerance).encode("ascii"))
        h.update(self.expected.astype(np.int64).tobytes())
        return h.hexdigest()


def _to_luma_uint8(rgb: np.ndarray) -> np.ndarray:
    wr, wg, wb = LUMA_WEIGHTS
    luma = wr * rgb[..., 0] + wg * rgb[..., 1] + wb * rgb[..., 2]
    return np.clip(round_half_away(luma), 0, 255).astype(np.uint8)


def _decode_image(path: Path) -> np.ndarray:
    """Decode one file to a float64 grayscale array in [0, 255]."""
    with Image.open(path) as im:
        if im.mode in ("1", "P"):
            im = im.convert("RGB") if im.mode == "P" else im.convert("L")
        if im.mode == "L":
            arr = np.asarray(im, dtype=np.uint8)
        elif im.mode in ("RGB", "RGBA"):
            rgb = np.asarray(im.convert("RGBA"))[..., :3].astype(np.float64)
            arr = _to_luma_uint8(rgb)
        else:
            raise ValueError(f"unsupported image mode {im.mode!r} (need 8-bit gray or color)")
    return arr.astype(np.float64)


def load_traverse(directory: str | Path, pattern: str = "*") -> Traverse:
    """Load all files matching ``pattern`` in ``directory``, sorted by name."""
    root = Path(directory)
    if not root.is_dir():
        raise FileNotFoundError(f"traverse directory not found: {root}")
    names = sorted(p.name for p in root.glob(pattern) if p.is_file())
    if len(names) < 2:
        raise ValueError(
            f"too few images: {len(names)} file(s) in {root} match {pattern!r}, need at least 2"
        )
    images = []
    for name in names:
        try:
            images.append(_decode_image(root / name))
        except Exception as err:
            raise ValueError(f"cannot decode image {root / name}: {err}") from err
    return Traverse(images=tuple(images), ids=tuple(names))


def subsample(t: Traverse, step: int) -> Traverse:
    """Keep frames 0, step, 2*step, ... (length becomes ceil(len/step))."""
    if step < 1:
        raise ValueError("subsample step must be >= 1")
    if step == 1:
        return t
    images = t.images[::step]
    ids = t.ids[::step]
    if len(images) < 2:
        raise ValueError(
            f"too few images after subsampling: step {step} leaves {len(images)} of {len(t)}"
        )
    return Traverse(images=images, ids=ids)


def load_ground_truth(path: str | Path, m: int, n: int) -> GroundTruth:
    """Parse the ground-truth CSV: `tolerance,<int>` header then `query,reference` rows."""
    expected = np.full(m, -1, dtype=np.int64)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        tolerance = None
        for lineno, row in enumerate(reader, start=1):
            if not row:
                continue
            if lineno == 1:
                if len(row) != 2 or row[0].strip() != "tolerance":
                    raise ValueError(f"{path}: line 1: expected 'tolerance,<int>' header")
                try:
                    tolerance = int(row[1])
                except ValueError:
                    raise ValueError(f"{path}: line 1: tolerance is not an integer") from None
                if tolerance < 0:
                    raise ValueError(f"{path}: line 1: tolerance must be >= 0")
                continue
            if len(row) != 2:
                raise ValueError(f"{path}: line {lineno}: expected 'query_index,reference_index'")
            try:
                q, r = int(row[0]), int(row[1])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: indices are not integers") from None
            if not 0 <= q < m:
                raise ValueError(f"{path}: line {lineno}: query index {q} out of range [0, {m})")
            if not 0 <= r < n:
                raise ValueError(f"{path}: line {lineno}: reference index {r} out of range [0, {n})")
            if expected[q] != -1:
                raise ValueError(f"{path}: line {lineno}: duplicate query index {q}")
            expected[q] = r
    if tolerance is None:
        raise ValueError(f"{path}: empty file, expected 'tolerance,<int>' header")
    return GroundTruth(expected=expected, tolerance=tolerance)


def write_ground_truth(path: str | Path, tolerance: int, pairs: dict[int, int]) -> None:
    """Write the ground-truth CSV format (used by the synthetic generator)."""
    lines = [f"tolerance,{tolerance}"]
    lines += [f"{q},{r}" for q, r in sorted(pairs.items())]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

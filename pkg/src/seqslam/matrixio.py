"""SSM1 binary matrix files, used for caching and by the explorer service.

Layout: magic "SSM1", little-endian u32 n, u32 m, then n*m little-endian
float64 values in row-major order. Score matrices append one orientation
byte (0 = lower_is_better, 1 = higher_is_better) and the validity bitmask,
row-major, 8 cells per byte, least-significant bit first.
"""

from __future__ import annotations

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .search import HIGHER_IS_BETTER, LOWER_IS_BETTER, ScoreMatrix

MAGIC = b"SSM1"
_HEADER = struct.Struct("<4sII")

_ORIENTATION_BYTE = {LOWER_IS_BETTER: 0, HIGHER_IS_BETTER: 1}
_BYTE_ORIENTATION = {v: k for k, v in _ORIENTATION_BYTE.items()}


def write_bytes_atomic(path: str | Path, data: bytes) -> None:
    """Write via a temp file in the same directory plus rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_text_atomic(path: str | Path, text: str) -> None:
    write_bytes_atomic(path, text.encode("utf-8"))


def _matrix_bytes(values: np.ndarray) -> bytes:
    n, m = values.shape
    header = _HEADER.pack(MAGIC, n, m)
    body = np.ascontiguousarray(values, dtype="<f8").tobytes()
    return header + body


def write_matrix(path: str | Path, values: np.ndarray) -> None:
    write_bytes_atomic(path, _matrix_bytes(values))


def _parse_matrix(data: bytes) -> tuple[np.ndarray, bytes]:
    if len(data) < _HEADER.size:
        raise ValueError("truncated SSM1 file")
    magic, n, m = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}, expected {MAGIC!r}")
    end = _HEADER.size + n * m * 8
    if len(data) < end:
        raise ValueError("truncated SSM1 payload")
    values = np.frombuffer(data[_HEADER.size : end], dtype="<f8").reshape(n, m).copy()
    return values, data[end:]


def read_matrix(path: str | Path) -> np.ndarray:
    values, rest = _parse_matrix(Path(path).read_bytes())
    if rest:
        raise ValueError("trailing bytes after SSM1 matrix payload")
    return values


def write_score_matrix(path: str | Path, s: ScoreMatrix) -> None:
    mask = np.packbits(s.valid.reshape(-1).astype(np.uint8), bitorder="little").tobytes()
    data = _matrix_bytes(s.scores) + bytes([_ORIENTATION_BYTE[s.orientation]]) + mask
    write_bytes_atomic(path, data)


def read_score_matrix(path: str | Path) -> ScoreMatrix:
    values, rest = _parse_matrix(Path(path).read_bytes())
    n, m = values.shape
    mask_len = (n * m + 7) // 8
    if len(rest) != 1 + mask_len:
        raise ValueError("bad score-matrix trailer length")
    if rest[0] not in _BYTE_ORIENTATION:
        raise ValueError(f"bad orientation byte {rest[0]}")
    bits = np.unpackbits(np.frombuffer(rest[1:], dtype=np.uint8), bitorder="little")
    valid = bits[: n * m].astype(bool).reshape(n, m)
    return ScoreMatrix(scores=values, valid=valid, orientation=_BYTE_ORIENTATION[rest[0]])

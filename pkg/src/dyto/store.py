"""Tensor data model and the DYT1 binary interchange format.

DYT1 layout, little-endian throughout:

====================  ====================================================
bytes 0-3             magic ``DYT1``
byte 4                dtype code (1 = 32-bit IEEE float)
byte 5                rank (2 or 3)
bytes 6-7             zero padding
bytes 8..8+rank*8     dims, unsigned 64-bit each
remainder             payload, row-major (frame, then token, then channel)
====================  ====================================================

Rank 3 carries per-frame video tokens (N, L, D) with the CLS token at
position 0 of each frame; rank 2 is a generic matrix. Writing and
re-reading is bit-identical.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, StorageError, ValidationError

MAGIC = b"DYT1"
DTYPE_FLOAT32 = 1
HEADER_PRELUDE = 8  # magic + dtype + rank + padding


@dataclass
class VideoTokens:
    """N x L x D float32 token tensor, CLS at token index 0 of each frame."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 3:
            raise ValidationError(f"video tokens must be rank 3, got rank {arr.ndim}")
        n, l, d = arr.shape
        if n < 1 or d < 1:
            raise ValidationError(f"empty token tensor: shape {arr.shape}")
        if l < 2:
            raise ValidationError(
                f"need a CLS token plus at least one patch token per frame, got L={l}"
            )
        if not np.isfinite(arr).all():
            raise ValidationError("video tokens contain non-finite values")
        self.data = arr

    @property
    def n_frames(self) -> int:
        return self.data.shape[0]

    @property
    def tokens_per_frame(self) -> int:
        return self.data.shape[1]

    @property
    def dim(self) -> int:
        return self.data.shape[2]


@dataclass
class ClsSequence:
    """Unit-normalized per-frame CLS vectors with timestamps 1..N."""

    vectors: np.ndarray  # (N, D) float64, rows L2-normalized
    timestamps: np.ndarray  # (N,) float64, exactly 1..N

    @property
    def n_frames(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def extract_cls_sequence(tokens: VideoTokens) -> ClsSequence:
    """Collect and L2-normalize the CLS token of every frame."""
    raw = tokens.data[:, 0, :].astype(np.float64)
    norms = np.linalg.norm(raw, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ValidationError(f"zero-norm CLS token in frame {int(zero[0])}")
    vectors = raw / norms[:, None]
    timestamps = np.arange(1, tokens.n_frames + 1, dtype=np.float64)
    return ClsSequence(vectors=vectors, timestamps=timestamps)


def save_array(arr: np.ndarray, path) -> None:
    """Write a rank-2 or rank-3 float32 array in DYT1 form."""
    arr = np.ascontiguousarray(arr, dtype=np.float32)
    if arr.ndim not in (2, 3):
        raise ValidationError(f"DYT1 stores rank 2 or 3, got rank {arr.ndim}")
    if not np.isfinite(arr).all():
        raise ValidationError("refusing to write non-finite values")
    header = MAGIC + bytes([DTYPE_FLOAT32, arr.ndim, 0, 0])
    dims = struct.pack(f"<{arr.ndim}Q", *arr.shape)
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(dims)
            fh.write(arr.tobytes(order="C"))
    except OSError as exc:
        raise StorageError(f"cannot write {path}: {exc}") from exc


def load_array(path) -> np.ndarray:
    """Read a DYT1 file back into a float32 array."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise StorageError(f"cannot read {path}: {exc}") from exc
    if len(blob) < HEADER_PRELUDE:
        raise FormatError(f"{path}: truncated header ({len(blob)} bytes)")
    if blob[:4] != MAGIC:
        raise FormatError(f"{path}: bad magic {blob[:4]!r}")
    dtype_code, rank = blob[4], blob[5]
    if dtype_code != DTYPE_FLOAT32:
        raise FormatError(f"{path}: unsupported dtype code {dtype_code}")
    if rank not in (2, 3):
        raise FormatError(f"{path}: unsupported rank {rank}")
    dims_end = HEADER_PRELUDE + 8 * rank
    if len(blob) < dims_end:
        raise FormatError(f"{path}: truncated dims")
    dims = struct.unpack(f"<{rank}Q", blob[HEADER_PRELUDE:dims_end])
    expected = 4 * int(np.prod([int(d) for d in dims], dtype=object))
    payload = blob[dims_end:]
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload is {len(payload)} bytes, dims {dims} require {expected}"
        )
    arr = np.frombuffer(payload, dtype="<f4").reshape(dims)
    if not np.isfinite(arr).all():
        raise ValidationError(f"{path}: payload contains non-finite values")
    return arr.copy()


def save_tokens(tokens: VideoTokens, path) -> None:
    save_array(tokens.data, path)


def load_tokens(path) -> VideoTokens:
    arr = load_array(path)
    if arr.ndim != 3:
        raise FormatError(f"{path}: expected rank-3 video tokens, got rank {arr.ndim}")
    return VideoTokens(arr)

"""In-memory bindings for the dyto compressor.

Embedding pipelines that already hold (N, L, D) float32 arrays can call the
compressor directly instead of shelling out to the CLI: outputs are
bit-identical to the CLI path on the same data, and the sidecar document
matches the CLI's sidecar JSON structure. Also converts between the DYT1
interchange format and .npy, the host ecosystem's common array file.

Arrays are validated at the boundary (rank 2/3, 32-bit float, finite).
Contiguous row-major float32 buffers are used zero-copy; anything else is
copied once. Core errors propagate as the core's exception types.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from dyto import (
    DytoError,
    InputError,
    ConfigError,
    PipelineConfig,
    VideoTokens,
    build_sidecar,
)
from dyto import run_baseline_uniform_pool as _core_run_baseline
from dyto import run_dyto as _core_run_dyto
from dyto.store import load_array as _load_array
from dyto.store import save_array as _save_array

__all__ = [
    "ConversionError",
    "convert",
    "load_dyt",
    "run_baseline",
    "run_dyto",
    "save_dyt",
]

__version__ = "0.1.0"


class ConversionError(DytoError):
    """File cannot be converted losslessly."""


def _validated_video(array) -> VideoTokens:
    if not isinstance(array, np.ndarray):
        raise InputError(f"expected a numpy array, got {type(array).__name__}")
    if array.ndim != 3:
        raise InputError(f"expected a rank-3 (frames, tokens, channels) array, got rank {array.ndim}")
    if array.dtype != np.float32:
        raise InputError(f"expected float32 elements, got {array.dtype} (convert explicitly)")
    return VideoTokens(np.ascontiguousarray(array))


def _config(config: dict) -> PipelineConfig:
    try:
        return PipelineConfig(**config)
    except TypeError as exc:
        raise ConfigError(f"unknown configuration key: {exc}") from exc


def run_dyto(array: np.ndarray, trace: bool = False, **config):
    """Compress a video array; returns (merged (K, T_f, D) float32, sidecar dict)."""
    cv = _core_run_dyto(_validated_video(array), _config(config))
    return cv.stacked(), build_sidecar(cv, include_trace=trace)


def run_baseline(array: np.ndarray, trace: bool = False, **config):
    """Uniform-sample + pool baseline; same return shape as run_dyto."""
    cv = _core_run_baseline(_validated_video(array), _config(config))
    return cv.stacked(), build_sidecar(cv, include_trace=trace)


def load_dyt(path) -> np.ndarray:
    """Read a DYT1 file into a float32 array (rank 2 or 3)."""
    return _load_array(path)


def save_dyt(array: np.ndarray, path) -> None:
    """Write a float32 array (rank 2 or 3) as DYT1."""
    if not isinstance(array, np.ndarray):
        raise InputError(f"expected a numpy array, got {type(array).__name__}")
    if array.dtype != np.float32:
        raise InputError(f"expected float32 elements, got {array.dtype} (convert explicitly)")
    _save_array(array, path)


def _infer_direction(src: Path, dst: Path) -> str:
    if src.suffix == ".dyt" and dst.suffix == ".npy":
        return "to-npy"
    if src.suffix == ".npy" and dst.suffix == ".dyt":
        return "to-dyt1"
    raise ConversionError(
        f"cannot infer direction from {src.name!r} -> {dst.name!r}; pass direction="
    )


def convert(src, dst, direction: str | None = None) -> None:
    """Lossless float32 conversion between DYT1 and .npy; round-trips exactly."""
    src, dst = Path(src), Path(dst)
    if direction is None:
        direction = _infer_direction(src, dst)
    if direction == "to-npy":
        with open(dst, "wb") as fh:  # keep dst exactly; np.save(path) appends .npy
            np.save(fh, _load_array(src))
    elif direction == "to-dyt1":
        try:
            array = np.load(src, allow_pickle=False)
        except (OSError, ValueError) as exc:
            raise ConversionError(f"cannot read {src}: {exc}") from exc
        if array.dtype != np.float32:
            raise ConversionError(
                f"{src}: dtype {array.dtype} is not float32; refusing a silent conversion"
            )
        if array.ndim not in (2, 3):
            raise ConversionError(f"{src}: rank {array.ndim} does not fit DYT1 (rank 2 or 3)")
        _save_array(array, dst)
    else:
        raise ConversionError(f"unknown direction {direction!r} (use to-npy or to-dyt1)")

"""Seeded synthetic videos with known event structure.

Each event gets a unit direction (orthonormalized seeded gaussians). A
frame's CLS token is its event direction plus isotropic noise, renormalized.
Patch tokens carry the event direction plus a per-patch offset that is fixed
across frames - interleaved group vectors plus a small per-patch jitter - so
spatial structure exists for merging to preserve, plus per-frame noise.
Identical spec and seed reproduce the tensors bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, ValidationError
from .rng import CounterRng
from .store import VideoTokens


@dataclass
class SyntheticSpec:
    n_frames: int
    n_events: int
    tokens_per_frame: int = 37
    dim: int = 32
    sigma: float = 0.05
    seed: int = 0
    boundaries: list | None = None  # explicit interior cut points, ascending
    min_event_len: int = 2  # random-boundary mode only
    patch_groups: int = 8
    group_scale: float = 0.6
    jitter_scale: float = 0.1

    def __post_init__(self):
        if self.n_events < 1:
            raise InputError(f"need at least one event, got {self.n_events}")
        if self.n_events > self.n_frames:
            raise InputError(
                f"{self.n_events} events do not fit in {self.n_frames} frames"
            )
        if self.n_events > self.dim:
            raise InputError(
                f"cannot draw {self.n_events} orthogonal directions in dim {self.dim}"
            )
        if self.tokens_per_frame < 2:
            raise InputError("need a CLS slot plus at least one patch token")
        if self.sigma < 0:
            raise InputError("noise level must be non-negative")


@dataclass
class GroundTruth:
    boundaries: list  # half-open (lo, hi) frame ranges, 0-based, covering 0..N
    labels: np.ndarray  # (N,) int64 event ids

    def to_document(self) -> dict:
        return {
            "boundaries": [[int(lo), int(hi)] for lo, hi in self.boundaries],
            "labels": [int(x) for x in self.labels],
        }

    @classmethod
    def from_document(cls, doc: dict) -> "GroundTruth":
        return cls(
            boundaries=[(int(lo), int(hi)) for lo, hi in doc["boundaries"]],
            labels=np.asarray(doc["labels"], dtype=np.int64),
        )


def _orthonormal_directions(rng: CounterRng, count: int, dim: int) -> np.ndarray:
    raw = rng.gaussians(0, count * dim).reshape(count, dim)
    dirs = np.zeros((count, dim))
    for e in range(count):
        v = raw[e].copy()
        for f in range(e):
            v -= (v @ dirs[f]) * dirs[f]
        norm = np.linalg.norm(v)
        if norm < 1e-9:
            raise ValidationError(f"degenerate direction draw for event {e}")
        dirs[e] = v / norm
    return dirs


def _random_cuts(rng: CounterRng, n_frames: int, n_events: int, min_len: int) -> list:
    """E-1 distinct interior cuts with every event at least min_len long."""
    counter = 0
    while True:
        cuts: list = []
        while len(cuts) < n_events - 1:
            u = rng.uniforms(counter, 1)[0]
            counter += 1
            if counter > 100_000:
                raise ValidationError("could not sample event boundaries; relax min_event_len")
            cut = 1 + int(u * (n_frames - 1))
            if cut not in cuts:
                cuts.append(cut)
        bounds = [0] + sorted(cuts) + [n_frames]
        if all(bounds[i + 1] - bounds[i] >= min_len for i in range(n_events)):
            return sorted(cuts)


def generate_synthetic_video(spec: SyntheticSpec) -> tuple:
    """Build (VideoTokens, GroundTruth) deterministically from the spec."""
    n, e, l, d = spec.n_frames, spec.n_events, spec.tokens_per_frame, spec.dim
    rng = CounterRng(spec.seed)
    dirs = _orthonormal_directions(rng.child(0), e, d)

    if spec.boundaries is not None:
        cuts = [int(c) for c in spec.boundaries]
        if len(cuts) != e - 1:
            raise InputError(f"{e} events need {e - 1} cut points, got {len(cuts)}")
        if any(not 1 <= c <= n - 1 for c in cuts) or sorted(set(cuts)) != cuts:
            raise InputError("cut points must be distinct, ascending, inside 1..N-1")
    else:
        cuts = _random_cuts(rng.child(1), n, e, spec.min_event_len)
    bounds = [0] + cuts + [n]
    ranges = [(bounds[i], bounds[i + 1]) for i in range(e)]
    labels = np.zeros(n, dtype=np.int64)
    for event, (lo, hi) in enumerate(ranges):
        labels[lo:hi] = event

    patches = l - 1
    groups = min(spec.patch_groups, patches)
    group_vecs = rng.child(2).gaussians(0, groups * d).reshape(groups, d)
    group_vecs /= np.linalg.norm(group_vecs, axis=1, keepdims=True)
    jitter = rng.child(3).gaussians(0, patches * d).reshape(patches, d)
    offsets = (
        spec.group_scale * group_vecs[np.arange(patches) % groups]
        + spec.jitter_scale * jitter
    )

    frame_dirs = dirs[labels]  # (N, D)
    data = np.empty((n, l, d), dtype=np.float32)
    if spec.sigma == 0.0:
        # noiseless: frames repeat per event, so build one body per event
        cls = frame_dirs / np.linalg.norm(frame_dirs, axis=1, keepdims=True)
        data[:, 0, :] = cls.astype(np.float32)
        for event, (lo, hi) in enumerate(ranges):
            body = (dirs[event][None, :] + offsets).astype(np.float32)
            data[lo:hi, 1:, :] = body[None, :, :]
    else:
        cls_noise = rng.child(4).gaussians(0, n * d).reshape(n, d)
        patch_noise = rng.child(5).gaussians(0, n * patches * d).reshape(n, patches, d)
        cls = frame_dirs + spec.sigma * cls_noise
        cls /= np.linalg.norm(cls, axis=1, keepdims=True)
        data[:, 0, :] = cls.astype(np.float32)
        body = frame_dirs[:, None, :] + offsets[None, :, :] + spec.sigma * patch_noise
        data[:, 1:, :] = body.astype(np.float32)

    return VideoTokens(data), GroundTruth(boundaries=ranges, labels=labels)

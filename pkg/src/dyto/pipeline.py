"""End-to-end transform: cluster frames into events, keep one keyframe per
event, and merge each keyframe's patch tokens down to the per-frame budget.
Also provides the uniform-sample + average-pool baseline used for
comparisons."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .clustering import (
    DEFAULT_DISSIMILARITY_CUTOFF,
    KeyframeSet,
    Partition,
    PartitionHierarchy,
    build_hierarchy,
    clusters_document,
    select_keyframes,
    select_partition,
)
from .errors import ConfigError, InputError
from .merging import MergedFrame, TokenSet, compress_frame, merge_trace, plan_budget
from .store import VideoTokens, extract_cls_sequence

PARTITION_POLICIES = ("auto", "penultimate")


@dataclass
class PipelineConfig:
    n_frames: int = 100
    budget: int = 3680
    heads: int = 16
    r1_cap: int = 288
    keyframe_policy: str = "temporal-middle"
    partition_policy: str = "auto"
    partition_level: int | None = None  # explicit level override, wins over policy
    dissimilarity_cutoff: float = DEFAULT_DISSIMILARITY_CUTOFF
    seed: int = 0
    frames_to_sample: int = 10  # baseline: frames kept
    pool_grid: int = 12  # baseline: pooled grid side
    unweighted_mean: bool = False  # plain mean instead of size-weighted pooling
    spread_remainder: bool = False  # first budget%K keyframes get one extra token

    def __post_init__(self):
        for name in ("n_frames", "budget", "heads", "r1_cap", "frames_to_sample", "pool_grid"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.partition_policy not in PARTITION_POLICIES:
            raise ConfigError(
                f"unknown partition policy {self.partition_policy!r}; "
                f"choose from {PARTITION_POLICIES}"
            )
        if not 0.0 < self.dissimilarity_cutoff <= 2.0:
            raise ConfigError("dissimilarity_cutoff must lie in (0, 2]")


@dataclass
class CompressedVideo:
    keyframes: KeyframeSet
    frames: list  # MergedFrame per keyframe, temporal order
    config: PipelineConfig
    total_tokens: int
    partition: Partition
    selected_level: int | None = None
    hierarchy: PartitionHierarchy | None = None
    method: str = "dyto"
    schedules: list = field(default_factory=list)  # parallel to frames

    def stacked(self) -> np.ndarray:
        """Merged tokens as one (K, T_f, D) float32 tensor."""
        counts = {f.tokens.count for f in self.frames}
        if len(counts) != 1:
            raise ConfigError(
                f"frames have differing token counts {sorted(counts)}; "
                "cannot pack a rank-3 tensor"
            )
        return np.stack([f.tokens.values for f in self.frames]).astype(np.float32)


def _pick_partition(h: PartitionHierarchy, cfg: PipelineConfig) -> tuple:
    if cfg.partition_level is not None:
        if not 0 <= cfg.partition_level < len(h.levels):
            raise ConfigError(
                f"partition level {cfg.partition_level} out of range "
                f"(hierarchy has {len(h.levels)} levels)"
            )
        return cfg.partition_level, h.levels[cfg.partition_level]
    if cfg.partition_policy == "penultimate":
        for idx in range(len(h.levels) - 1, -1, -1):
            if h.levels[idx].k >= 2:
                return idx, h.levels[idx]
        return len(h.levels) - 1, h.levels[-1]
    return h.auto_level, h.levels[h.auto_level]


def run_dyto(tokens: VideoTokens, cfg: PipelineConfig) -> CompressedVideo:
    """Cluster, pick keyframes, and compress each to the per-frame budget."""
    if tokens.dim % cfg.heads != 0:
        raise ConfigError(f"head count {cfg.heads} does not divide dim {tokens.dim}")
    cls = extract_cls_sequence(tokens)
    hierarchy = build_hierarchy(cls, cfg.dissimilarity_cutoff)
    level, partition = _pick_partition(hierarchy, cfg)
    k = partition.k
    if cfg.budget < k:
        raise ConfigError(
            f"budget {cfg.budget} is below the discovered cluster count K={k}"
        )
    keyframes = select_keyframes(partition, cfg.keyframe_policy, cls=cls, seed=cfg.seed)

    start = tokens.tokens_per_frame - 1
    base_target = min(start, cfg.budget // k)
    extras = cfg.budget - k * base_target if cfg.spread_remainder else 0
    frames, schedules = [], []
    for rank, frame_idx in enumerate(keyframes.frames):
        target = base_target + 1 if rank < extras else base_target
        target = min(start, target)
        schedule = plan_budget(
            tokens.tokens_per_frame, cfg.budget, k, cfg.r1_cap, heads=cfg.heads, target=target
        )
        merged = compress_frame(
            tokens.data[frame_idx, 1:, :], schedule, frame_index=frame_idx, keep_steps=True
        )
        if cfg.unweighted_mean:
            merged = _recompress_unweighted(tokens.data[frame_idx, 1:, :], merged)
        frames.append(merged)
        schedules.append(schedule)

    total = sum(f.tokens.count for f in frames)
    return CompressedVideo(
        keyframes=keyframes,
        frames=frames,
        config=cfg,
        total_tokens=total,
        partition=partition,
        selected_level=level,
        hierarchy=hierarchy,
        schedules=schedules,
    )


def _recompress_unweighted(frame_values: np.ndarray, merged: MergedFrame) -> MergedFrame:
    """Replace each merged token by the plain mean of its source patches."""
    values = np.stack(
        [
            frame_values[sorted(prov)].astype(np.float64).mean(axis=0)
            for prov in merged.tokens.provenance
        ]
    ).astype(np.float32)
    tokens = TokenSet(values=values, sizes=merged.tokens.sizes, provenance=merged.tokens.provenance)
    return MergedFrame(frame_index=merged.frame_index, tokens=tokens, steps=merged.steps)


def uniform_sample_indices(n_frames: int, count: int) -> list:
    """Evenly spaced frame indices starting at 0."""
    if count < 1:
        raise ConfigError(f"must sample at least one frame, got {count}")
    if count > n_frames:
        raise InputError(f"cannot sample {count} of {n_frames} frames")
    return [i * n_frames // count for i in range(count)]


def run_baseline_uniform_pool(tokens: VideoTokens, cfg: PipelineConfig) -> CompressedVideo:
    """Uniformly sample frames and average-pool each patch grid in blocks."""
    side = math.isqrt(tokens.tokens_per_frame - 1)
    if side * side != tokens.tokens_per_frame - 1:
        raise ConfigError(
            f"baseline pooling needs a square patch grid, got {tokens.tokens_per_frame - 1} patches"
        )
    if side % cfg.pool_grid != 0:
        raise ConfigError(
            f"pool grid {cfg.pool_grid} does not divide the patch grid side {side}"
        )
    sampled = uniform_sample_indices(tokens.n_frames, cfg.frames_to_sample)
    out_tokens = cfg.pool_grid * cfg.pool_grid
    if len(sampled) * out_tokens > cfg.budget:
        raise ConfigError(
            f"baseline would emit {len(sampled) * out_tokens} tokens, over budget {cfg.budget}"
        )
    block = side // cfg.pool_grid
    frames = []
    for frame_idx in sampled:
        patches = tokens.data[frame_idx, 1:, :].astype(np.float64)
        grid = patches.reshape(side, side, tokens.dim)
        pooled = grid.reshape(cfg.pool_grid, block, cfg.pool_grid, block, tokens.dim).mean(
            axis=(1, 3)
        )
        values = pooled.reshape(out_tokens, tokens.dim).astype(np.float32)
        patch_ids = np.arange(side * side).reshape(side, side)
        provenance = [
            frozenset(
                patch_ids[u * block : (u + 1) * block, v * block : (v + 1) * block].ravel().tolist()
            )
            for u in range(cfg.pool_grid)
            for v in range(cfg.pool_grid)
        ]
        tset = TokenSet(
            values=values,
            sizes=np.full(out_tokens, block * block, dtype=np.int64),
            provenance=provenance,
        )
        frames.append(MergedFrame(frame_index=frame_idx, tokens=tset))

    labels = _nearest_sample_labels(tokens.n_frames, sampled)
    partition = Partition(
        n=tokens.n_frames,
        labels=labels,
        k=len(sampled),
        cluster_timestamps=np.array(
            [np.flatnonzero(labels == c).mean() + 1.0 for c in range(len(sampled))]
        ),
    )
    return CompressedVideo(
        keyframes=KeyframeSet(frames=list(sampled), source_clusters=list(range(len(sampled)))),
        frames=frames,
        config=cfg,
        total_tokens=len(sampled) * out_tokens,
        partition=partition,
        method="uniform-pool",
    )


def _nearest_sample_labels(n_frames: int, sampled: list) -> np.ndarray:
    """Implied segmentation: each frame joins its nearest sampled frame."""
    anchors = np.asarray(sampled)
    gaps = np.abs(np.arange(n_frames)[:, None] - anchors[None, :])
    return np.argmin(gaps, axis=1).astype(np.int64)


def build_sidecar(cv: CompressedVideo, include_trace: bool = False) -> dict:
    """JSON-ready companion document for a compressed video tensor."""
    doc = {
        "method": cv.method,
        "config": asdict(cv.config),
        "keyframes": [int(f) for f in cv.keyframes.frames],
        "total_tokens": int(cv.total_tokens),
        "tokens_per_frame": sorted({f.tokens.count for f in cv.frames}),
    }
    if cv.hierarchy is not None:
        doc["clusters"] = clusters_document(
            cv.hierarchy, cv.selected_level, cv.keyframes, cv.config.keyframe_policy
        )
    if include_trace:
        doc["frames"] = [
            merge_trace(frame, schedule)
            for frame, schedule in zip(cv.frames, cv.schedules)
        ]
        if not cv.schedules:  # baseline: no merge schedule, still expose provenance
            doc["frames"] = [
                {
                    "frame": f.frame_index,
                    "schedule": [],
                    "provenance": [sorted(int(s) for s in prov) for prov in f.tokens.provenance],
                    "sizes": [int(s) for s in f.tokens.sizes],
                }
                for f in cv.frames
            ]
    return doc

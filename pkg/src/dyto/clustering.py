"""Temporal event clustering over per-frame CLS vectors.

Frames are compared with a temporally-weighted distance: for unit vectors
``v_i, v_j`` at timestamps ``t_i, t_j`` out of ``N`` frames,

    d(i, j) = (1 - <v_i, v_j>) * |t_i - t_j| / N      (i != j, 1 on the diagonal)

A 1-NN graph over these distances (each node keeps only its closest distinct
neighbor, edges symmetrized) is split into connected components, giving the
finest partition. Coarser levels repeat the construction on cluster nodes
whose features are the L2-normalized means of member CLS vectors and whose
timestamps are the means of member timestamps, with the divisor N held fixed,
until a single cluster remains.

While building coarser levels, a 1-NN link is only followed as long as the
two clusters it joins are still similar in feature space (1 - cosine below
``dissimilarity_cutoff``). The last level reachable through similar links
alone is recorded as ``auto_level``; it is where within-event merging has
saturated and further merging would fuse unrelated events on temporal
proximity alone. Levels past it are still built (unguarded) so the hierarchy
always ends at one cluster.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InputError, ValidationError
from .rng import CounterRng
from .store import ClsSequence

DEFAULT_DISSIMILARITY_CUTOFF = 0.5

KEYFRAME_POLICIES = ("temporal-middle", "centroid-nearest", "random-uniform")


@dataclass
class DistanceMatrix:
    n: int
    values: np.ndarray  # (n, n) float64, symmetric, unit diagonal


@dataclass
class NNGraph:
    n: int
    edges: tuple  # sorted tuple of (i, j) pairs with i < j


@dataclass
class Partition:
    n: int
    labels: np.ndarray  # (n,) int64, cluster ids 0..k-1 ordered by first member
    k: int
    cluster_timestamps: np.ndarray  # (k,) float64, mean member timestamp

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.labels == c)


@dataclass
class PartitionHierarchy:
    levels: list  # finest first, last level has k == 1
    auto_level: int = 0  # last level reachable through similar merges only

    @property
    def cluster_counts(self) -> list:
        return [p.k for p in self.levels]


@dataclass
class KeyframeSet:
    frames: list  # ascending frame indices, one per cluster
    source_clusters: list  # parallel cluster ids
    k: int = field(init=False)

    def __post_init__(self):
        self.k = len(self.frames)


def _weighted_distances(vectors: np.ndarray, timestamps: np.ndarray, n_total: int) -> np.ndarray:
    """Distance matrix over unit rows; diagonal fixed to 1."""
    sim = vectors @ vectors.T
    gaps = np.abs(timestamps[:, None] - timestamps[None, :])
    values = (1.0 - sim) * gaps / float(n_total)
    np.fill_diagonal(values, 1.0)
    return values


def temporal_distance_matrix(cls: ClsSequence) -> DistanceMatrix:
    """Pairwise temporally-weighted distances between frame CLS vectors."""
    n = cls.n_frames
    if n < 2:
        raise InputError(f"need ≥ 2 frames, got {n}")
    values = _weighted_distances(cls.vectors, cls.timestamps, n)
    return DistanceMatrix(n=n, values=values)


def _nearest_neighbors(values: np.ndarray) -> np.ndarray:
    """Per-row argmin over distinct columns; ties go to the smaller index."""
    masked = values.copy()
    np.fill_diagonal(masked, np.inf)
    return np.argmin(masked, axis=1)


def one_nn_graph(w: DistanceMatrix) -> NNGraph:
    """Keep each node's single closest distinct neighbor, symmetrized."""
    nn = _nearest_neighbors(w.values)
    edges = {(min(i, int(j)), max(i, int(j))) for i, j in enumerate(nn)}
    return NNGraph(n=w.n, edges=tuple(sorted(edges)))


def _components(n: int, edges) -> np.ndarray:
    """Union-find component labels, renumbered by each component's first node."""
    parent = list(range(n))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    roots = [find(i) for i in range(n)]
    order: dict = {}
    for r in roots:
        if r not in order:
            order[r] = len(order)
    return np.array([order[r] for r in roots], dtype=np.int64)


def connected_components(g: NNGraph, timestamps: np.ndarray | None = None) -> Partition:
    """Components of the 1-NN graph as a partition with mean timestamps."""
    if timestamps is None:
        timestamps = np.arange(1, g.n + 1, dtype=np.float64)
    labels = _components(g.n, g.edges)
    k = int(labels.max()) + 1
    cluster_ts = np.array([timestamps[labels == c].mean() for c in range(k)])
    return Partition(n=g.n, labels=labels, k=k, cluster_timestamps=cluster_ts)


def build_hierarchy(
    cls: ClsSequence,
    dissimilarity_cutoff: float = DEFAULT_DISSIMILARITY_CUTOFF,
) -> PartitionHierarchy:
    """Recursive 1-NN merge hierarchy from finest partition down to one cluster."""
    n = cls.n_frames
    if n < 2:
        raise InputError(f"need ≥ 2 frames, got {n}")
    vectors = cls.vectors
    frame_ts = cls.timestamps

    w0 = _weighted_distances(vectors, frame_ts, n)
    labels = _components(n, one_nn_graph(DistanceMatrix(n, w0)).edges)
    levels = [_make_partition(labels, frame_ts)]
    auto_level = 0
    guarded = True

    while levels[-1].k > 1:
        part = levels[-1]
        k = part.k
        means = np.stack([vectors[part.labels == c].mean(axis=0) for c in range(k)])
        means /= np.linalg.norm(means, axis=1, keepdims=True)
        wk = _weighted_distances(means, part.cluster_timestamps, n)
        nn = _nearest_neighbors(wk)
        edges = {(min(i, int(j)), max(i, int(j))) for i, j in enumerate(nn)}
        if guarded:
            kept = {
                (a, b)
                for a, b in edges
                if 1.0 - float(means[a] @ means[b]) < dissimilarity_cutoff
            }
            if kept:
                edges = kept
            else:
                guarded = False  # saturated; later levels merge unguarded
        comp = _components(k, edges)
        new_labels = comp[part.labels]
        levels.append(_make_partition(new_labels, frame_ts))
        if guarded:
            auto_level = len(levels) - 1

    return PartitionHierarchy(levels=levels, auto_level=auto_level)


def _make_partition(labels: np.ndarray, frame_ts: np.ndarray) -> Partition:
    k = int(labels.max()) + 1
    cluster_ts = np.array([frame_ts[labels == c].mean() for c in range(k)])
    return Partition(n=len(labels), labels=labels, k=k, cluster_timestamps=cluster_ts)


def select_partition(h: PartitionHierarchy) -> Partition:
    """Last level with at least two clusters, else the single-cluster level."""
    for part in reversed(h.levels):
        if part.k >= 2:
            return part
    return h.levels[-1]


def select_keyframes(
    p: Partition,
    policy: str = "temporal-middle",
    cls: ClsSequence | None = None,
    seed: int | None = None,
) -> KeyframeSet:
    """One representative frame per cluster, sorted by frame index."""
    if policy not in KEYFRAME_POLICIES:
        raise ConfigError(f"unknown keyframe policy {policy!r}; choose from {KEYFRAME_POLICIES}")
    picks = []
    for c in range(p.k):
        members = p.members(c)
        if policy == "temporal-middle":
            frame = int(members[(len(members) - 1) // 2])
        elif policy == "centroid-nearest":
            if cls is None:
                raise ValidationError("centroid-nearest policy needs the CLS sequence")
            rows = cls.vectors[members]
            centroid = rows.mean(axis=0)
            dist = np.linalg.norm(rows - centroid, axis=1)
            frame = int(members[int(np.argmin(dist))])
        else:  # random-uniform
            if seed is None:
                raise ConfigError("random-uniform policy needs an explicit seed")
            u = CounterRng(seed).child(c).uniforms(0, 1)[0]
            frame = int(members[min(int(u * len(members)), len(members) - 1)])
        picks.append((frame, c))
    picks.sort()
    return KeyframeSet(frames=[f for f, _ in picks], source_clusters=[c for _, c in picks])


def clusters_document(
    h: PartitionHierarchy, selected_level: int, keyframes: KeyframeSet, policy: str
) -> dict:
    """JSON-ready clustering result; frame indices are 0-based."""
    return {
        "levels": [{"k": p.k, "labels": [int(x) for x in p.labels]} for p in h.levels],
        "selected_level": int(selected_level),
        "keyframes": [int(f) for f in keyframes.frames],
        "policy": policy,
    }

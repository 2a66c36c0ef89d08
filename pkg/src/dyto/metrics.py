"""Segmentation and reconstruction metrics against known event structure."""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .clustering import KeyframeSet, Partition
from .errors import InputError
from .pipeline import CompressedVideo
from .store import VideoTokens
from .synth import GroundTruth


def _assignment_total(cost: np.ndarray, perm) -> float:
    # one fixed summation order so equal-cost assignments compare exactly
    return float(np.sum(cost[np.arange(cost.shape[0]), perm]))


def hungarian_match(cost: np.ndarray) -> tuple:
    """Minimum-total-cost one-to-one assignment.

    Returns (permutation, total) where permutation[i] is the column assigned
    to row i. Among equal-cost optima the lexicographically smallest
    permutation is returned. Rectangular inputs are rejected; pad with
    zero-cost dummy rows/columns first.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise InputError(f"cost matrix must be square, got shape {cost.shape}")
    if not np.isfinite(cost).all():
        raise InputError("cost matrix must be finite")
    k = cost.shape[0]

    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(k, dtype=np.int64)
    perm[rows] = cols
    best_total = _assignment_total(cost, perm)

    # fix columns row by row, re-solving the remainder, to break ties
    # toward the lexicographically smallest optimal permutation
    fixed: list = []
    free_cols = sorted(set(range(k)))
    for i in range(k):
        for c in free_cols:
            if c >= perm[i]:
                break
            rest_rows = np.arange(i + 1, k)
            rest_cols = np.array([x for x in free_cols if x != c])
            candidate = np.concatenate([np.array(fixed + [c], dtype=np.int64), np.zeros(k - i - 1, dtype=np.int64)])
            if len(rest_rows):
                sub = cost[np.ix_(rest_rows, rest_cols)]
                r2, c2 = linear_sum_assignment(sub)
                candidate[i + 1 :][r2] = rest_cols[c2]
            total = _assignment_total(cost, candidate)
            if total <= best_total:
                best_total = total
                perm = candidate
                break
        fixed.append(int(perm[i]))
        free_cols.remove(int(perm[i]))
    return [int(x) for x in perm], best_total


def partition_accuracy(p: Partition, gt: GroundTruth) -> float:
    """Fraction of frames agreeing with events under the best cluster-event map."""
    labels = np.asarray(gt.labels)
    if p.n != len(labels):
        raise InputError(f"partition covers {p.n} frames, ground truth {len(labels)}")
    n_events = int(labels.max()) + 1
    side = max(p.k, n_events)
    table = np.zeros((side, side), dtype=np.float64)
    for c, e in zip(p.labels, labels):
        table[int(c), int(e)] += 1.0
    perm, _ = hungarian_match(-table)
    matched = sum(table[i, perm[i]] for i in range(side))
    return float(matched / p.n)


def event_coverage(k: KeyframeSet, gt: GroundTruth) -> float:
    """Fraction of events represented by at least one keyframe."""
    frames = list(k.frames) if isinstance(k, KeyframeSet) else list(k)
    if not gt.boundaries:
        return 0.0
    hit = sum(
        1 for lo, hi in gt.boundaries if any(lo <= f < hi for f in frames)
    )
    return hit / len(gt.boundaries)


def reconstruction_error(cv: CompressedVideo, original: VideoTokens) -> float:
    """Mean (1 - cosine) between each source patch and its merged token."""
    errors = []
    for frame in cv.frames:
        patches = original.data[frame.frame_index, 1:, :].astype(np.float64)
        reps = np.zeros_like(patches)
        covered = np.zeros(len(patches), dtype=bool)
        for token, prov in zip(frame.tokens.values, frame.tokens.provenance):
            if not prov:
                raise InputError(f"frame {frame.frame_index}: token without provenance")
            idx = sorted(prov)
            reps[idx] = np.asarray(token, dtype=np.float64)
            covered[idx] = True
        if not covered.all():
            raise InputError(f"frame {frame.frame_index}: provenance misses some patches")
        cos = np.einsum("pd,pd->p", patches, reps)
        cos /= np.linalg.norm(patches, axis=1) * np.linalg.norm(reps, axis=1)
        errors.append(1.0 - cos)
    return float(np.mean(np.concatenate(errors)))

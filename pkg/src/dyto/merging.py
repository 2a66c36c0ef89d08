"""Budgeted bipartite token merging inside a single frame.

Tokens are split by alternating position into sets P (even) and Q (odd).
Every P-token proposes its most similar Q-token under the head-split cosine
score, the r best proposals are merged (P-token folded into its Q-token by
size-weighted mean), survivors keep their order, and the split repeats for
the next schedule step. Sizes count how many source patches a token already
represents, and provenance tracks exactly which ones, so merged tokens can
be traced back to input patches.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InputError, ScheduleError, ValidationError


@dataclass
class TokenSet:
    """Live tokens of one frame with merge bookkeeping.

    provenance[i] holds the original patch indices absorbed into token i;
    the sets are disjoint and together cover 0..R0-1 of the source frame.
    """

    values: np.ndarray  # (R, D)
    sizes: np.ndarray  # (R,) int64, sizes[i] == len(provenance[i])
    provenance: list  # R frozensets of source patch indices

    @property
    def count(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def source_count(self) -> int:
        return int(self.sizes.sum())

    @classmethod
    def fresh(cls, values: np.ndarray) -> "TokenSet":
        values = np.asarray(values)
        if values.ndim != 2:
            raise InputError(f"token values must be rank 2, got rank {values.ndim}")
        r = values.shape[0]
        return cls(
            values=values.astype(np.float64),
            sizes=np.ones(r, dtype=np.int64),
            provenance=[frozenset((i,)) for i in range(r)],
        )

    def validate(self) -> None:
        seen: set = set()
        for i, prov in enumerate(self.provenance):
            if len(prov) != int(self.sizes[i]):
                raise ValidationError(f"token {i}: size {self.sizes[i]} != |provenance| {len(prov)}")
            if seen & prov:
                raise ValidationError(f"token {i}: provenance overlaps another token")
            seen |= prov
        if seen != set(range(self.source_count)):
            raise ValidationError("provenance does not cover the source patches exactly")


@dataclass
class MatchSet:
    """Selected merge pairs (p, q, score), scores non-increasing, p distinct."""

    pairs: list  # (p_index, q_index, score) in token order indices

    @property
    def r(self) -> int:
        return len(self.pairs)


@dataclass
class MergeSchedule:
    """Per-iteration merge counts taking a frame from start_count to target."""

    start_count: int
    target: int
    merges: list
    heads: int

    def __post_init__(self):
        r = self.start_count
        for i, m in enumerate(self.merges):
            if m < 1:
                raise ScheduleError(f"step {i}: merge count {m} < 1")
            if m > r // 2:
                raise ScheduleError(f"step {i}: cannot merge {m} of {r} tokens (max {r // 2})")
            r -= m
        if r != self.target:
            raise ScheduleError(f"schedule ends at {r} tokens, target is {self.target}")


@dataclass
class MergedFrame:
    """Compressed token set of one keyframe."""

    frame_index: int
    tokens: TokenSet
    steps: list | None = field(default=None)  # per-step (p, q) pairs when traced


def _head_slices(vectors: np.ndarray, heads: int) -> np.ndarray:
    """Reshape (R, D) to unit-normalized (R, H, D/H) head slices."""
    r, d = vectors.shape
    if d % heads != 0:
        raise ConfigError(f"head count {heads} does not divide dim {d}")
    sliced = vectors.reshape(r, heads, d // heads)
    norms = np.linalg.norm(sliced, axis=2)
    if (norms == 0.0).any():
        tok, head = np.argwhere(norms == 0.0)[0]
        raise ValidationError(f"zero-norm head slice {int(head)} in token {int(tok)}")
    return sliced / norms[:, :, None]


def head_similarity(a: np.ndarray, b: np.ndarray, heads: int) -> float:
    """Cosine similarity averaged over contiguous channel heads."""
    a = np.asarray(a, dtype=np.float64).reshape(1, -1)
    b = np.asarray(b, dtype=np.float64).reshape(1, -1)
    if a.shape != b.shape:
        raise InputError(f"vector dims differ: {a.shape[1]} vs {b.shape[1]}")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValidationError("similarity inputs must be finite")
    ah = _head_slices(a, heads)[0]
    bh = _head_slices(b, heads)[0]
    return float(np.einsum("hd,hd->h", ah, bh).mean())


def _score_table(values: np.ndarray, heads: int) -> tuple:
    """Head-averaged cosine scores between even-position and odd-position tokens."""
    p_idx = np.arange(0, values.shape[0], 2)
    q_idx = np.arange(1, values.shape[0], 2)
    sliced = _head_slices(values, heads)
    scores = np.einsum("phd,qhd->pq", sliced[p_idx], sliced[q_idx]) / heads
    return p_idx, q_idx, scores


def bipartite_match(t: TokenSet, r: int, heads: int) -> MatchSet:
    """Top-r most similar (P-token, Q-token) proposals.

    Each P-token proposes only its single best Q-token; proposal ties prefer
    the smaller Q index, selection ties the smaller P index.
    """
    if t.count < 2:
        raise InputError(f"need at least 2 tokens to match, got {t.count}")
    if r > t.count // 2:
        raise ScheduleError(f"cannot merge {r} of {t.count} tokens (max {t.count // 2})")
    if r == 0:
        return MatchSet(pairs=[])
    p_idx, q_idx, scores = _score_table(t.values, heads)
    best_q = np.argmax(scores, axis=1)  # first max -> smaller q on ties
    best_s = scores[np.arange(len(p_idx)), best_q]
    order = sorted(range(len(p_idx)), key=lambda i: (-best_s[i], p_idx[i]))[:r]
    pairs = [(int(p_idx[i]), int(q_idx[best_q[i]]), float(best_s[i])) for i in order]
    return MatchSet(pairs=pairs)


def merge_matched(t: TokenSet, m: MatchSet) -> TokenSet:
    """Fold each matched P-token into its Q-token by size-weighted mean."""
    values = t.values.copy()
    sizes = t.sizes.copy()
    provenance = list(t.provenance)
    removed = set()
    for p, q, _ in m.pairs:
        sp, sq = int(sizes[p]), int(sizes[q])
        values[q] = (sp * values[p] + sq * values[q]) / (sp + sq)
        sizes[q] = sp + sq
        provenance[q] = provenance[q] | provenance[p]
        removed.add(p)
    keep = [i for i in range(t.count) if i not in removed]
    return TokenSet(
        values=values[keep],
        sizes=sizes[keep],
        provenance=[provenance[i] for i in keep],
    )


def plan_budget(
    tokens_per_frame: int,
    budget: int,
    clusters: int,
    r1_cap: int,
    heads: int = 16,
    target: int | None = None,
) -> MergeSchedule:
    """Greedy per-frame schedule: first step capped at r1_cap, then halving.

    The CLS token is excluded, so a frame starts at R0 = L - 1 tokens and
    ends at target = min(R0, budget // clusters) unless an explicit target
    is given.
    """
    if clusters < 1:
        raise ConfigError(f"cluster count must be >= 1, got {clusters}")
    if tokens_per_frame < 2:
        raise InputError(f"need >= 2 tokens per frame, got {tokens_per_frame}")
    if budget < clusters:
        raise ConfigError(
            f"budget {budget} is below the cluster count {clusters}: "
            "not even one token per keyframe"
        )
    if r1_cap < 1:
        raise ConfigError(f"first-step cap must be >= 1, got {r1_cap}")
    start = tokens_per_frame - 1
    if target is None:
        target = min(start, budget // clusters)
    merges = []
    remaining = start
    while remaining > target:
        step = min(remaining // 2, remaining - target)
        if not merges:
            step = min(step, r1_cap)
        merges.append(step)
        remaining -= step
    return MergeSchedule(start_count=start, target=target, merges=merges, heads=heads)


def compress_frame(
    frame_values: np.ndarray,
    schedule: MergeSchedule,
    frame_index: int = 0,
    keep_steps: bool = False,
) -> MergedFrame:
    """Apply the schedule's match+merge steps to one frame's patch tokens."""
    frame_values = np.asarray(frame_values)
    if frame_values.ndim != 2 or frame_values.shape[0] != schedule.start_count:
        raise InputError(
            f"frame has shape {frame_values.shape}, schedule expects "
            f"({schedule.start_count}, D)"
        )
    tokens = TokenSet.fresh(frame_values)
    steps = [] if keep_steps else None
    for r in schedule.merges:
        match = bipartite_match(tokens, r, schedule.heads)
        if steps is not None:
            steps.append([(p, q) for p, q, _ in match.pairs])
        tokens = merge_matched(tokens, match)
    tokens.values = np.ascontiguousarray(tokens.values, dtype=np.float32)
    return MergedFrame(frame_index=frame_index, tokens=tokens, steps=steps)


def merge_trace(frame: MergedFrame, schedule: MergeSchedule) -> dict:
    """JSON-ready record sufficient to map merged tokens back to patches."""
    trace = {
        "frame": frame.frame_index,
        "schedule": [int(r) for r in schedule.merges],
        "provenance": [sorted(int(s) for s in prov) for prov in frame.tokens.provenance],
        "sizes": [int(s) for s in frame.tokens.sizes],
    }
    if frame.steps is not None:
        trace["steps"] = [{"pairs": [[int(p), int(q)] for p, q in step]} for step in frame.steps]
    return trace

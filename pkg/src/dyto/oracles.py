"""Brute-force references kept deliberately naive and loop-based.

These exist to check the vectorized implementations, so they share no code
with them: scores are computed with plain Python arithmetic and selections
with explicit loops.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InputError
from .merging import MatchSet, TokenSet

ORACLE_TOKEN_LIMIT = 16


def _plain_cosine(a, b) -> float:
    dot = sum(float(x) * float(y) for x, y in zip(a, b))
    na = math.sqrt(sum(float(x) * float(x) for x in a))
    nb = math.sqrt(sum(float(y) * float(y) for y in b))
    return dot / (na * nb)


def _plain_head_score(a, b, heads: int) -> float:
    d = len(a)
    step = d // heads
    total = 0.0
    for h in range(heads):
        total += _plain_cosine(a[h * step : (h + 1) * step], b[h * step : (h + 1) * step])
    return total / heads


def exhaustive_match_oracle(t: TokenSet, r: int, heads: int) -> MatchSet:
    """Full score table, per-P argmax, global top-r, documented tie-breaks."""
    if t.count > ORACLE_TOKEN_LIMIT:
        raise InputError(
            f"oracle is limited to {ORACLE_TOKEN_LIMIT} tokens, got {t.count}"
        )
    if t.count < 2:
        raise InputError(f"need at least 2 tokens to match, got {t.count}")
    if r > t.count // 2:
        raise InputError(f"cannot merge {r} of {t.count} tokens")
    p_positions = list(range(0, t.count, 2))
    q_positions = list(range(1, t.count, 2))
    proposals = []
    for p in p_positions:
        best_q, best_score = None, None
        for q in q_positions:
            score = _plain_head_score(t.values[p], t.values[q], heads)
            if best_score is None or score > best_score:  # strict: keeps smaller q on ties
                best_q, best_score = q, score
        proposals.append((p, best_q, best_score))
    proposals.sort(key=lambda item: (-item[2], item[0]))
    return MatchSet(pairs=[(p, q, float(s)) for p, q, s in proposals[:r]])


def mean_pool_tokens(values: np.ndarray, target: int) -> TokenSet:
    """Pool to `target` tokens by plain means over contiguous equal runs."""
    values = np.asarray(values, dtype=np.float64)
    count = values.shape[0]
    if not 1 <= target <= count:
        raise InputError(f"cannot pool {count} tokens to {target}")
    splits = np.linspace(0, count, target + 1).round().astype(int)
    pooled, sizes, provenance = [], [], []
    for i in range(target):
        lo, hi = int(splits[i]), int(splits[i + 1])
        pooled.append(values[lo:hi].mean(axis=0))
        sizes.append(hi - lo)
        provenance.append(frozenset(range(lo, hi)))
    return TokenSet(
        values=np.stack(pooled),
        sizes=np.asarray(sizes, dtype=np.int64),
        provenance=provenance,
    )

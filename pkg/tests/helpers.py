"""Shared naive reference implementations and builders for the tests.

Everything here is deliberately loop-based plain Python so the vectorized
library code is checked against an independent route.
"""

from __future__ import annotations

import math

import numpy as np

from dyto.merging import TokenSet
from dyto.rng import CounterRng


def naive_distance_matrix(vectors, timestamps, n_total):
    """Temporally-weighted distances via explicit double loop."""
    n = len(vectors)
    out = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                out[i][j] = 1.0
            else:
                dot = sum(float(a) * float(b) for a, b in zip(vectors[i], vectors[j]))
                out[i][j] = (1.0 - dot) * abs(float(timestamps[i]) - float(timestamps[j])) / n_total
    return np.array(out)


def naive_head_similarity(a, b, heads):
    """Mean per-head cosine via plain Python arithmetic."""
    d = len(a)
    step = d // heads
    total = 0.0
    for h in range(heads):
        sa = a[h * step : (h + 1) * step]
        sb = b[h * step : (h + 1) * step]
        dot = sum(float(x) * float(y) for x, y in zip(sa, sb))
        na = math.sqrt(sum(float(x) ** 2 for x in sa))
        nb = math.sqrt(sum(float(y) ** 2 for y in sb))
        total += dot / (na * nb)
    return total / heads


def naive_nn_edges(values):
    """Per-row argmin over distinct columns, ties to smaller index, symmetrized."""
    n = values.shape[0]
    edges = set()
    for i in range(n):
        best_j, best_d = None, None
        for j in range(n):
            if j == i:
                continue
            d = float(values[i][j])
            if best_d is None or d < best_d:
                best_j, best_d = j, d
        edges.add((min(i, best_j), max(i, best_j)))
    return tuple(sorted(edges))


_PERM_CACHE: dict = {}


def brute_force_assignment(cost):
    """Minimum-cost permutation by full enumeration, lexicographic on ties.

    The winning total is summed with the same single np.sum call the library
    uses so equal-cost assignments compare exactly.
    """
    from itertools import permutations

    cost = np.asarray(cost, dtype=np.float64)
    k = cost.shape[0]
    if k not in _PERM_CACHE:
        _PERM_CACHE[k] = np.array(list(permutations(range(k))), dtype=np.int64)
    perms = _PERM_CACHE[k]  # lexicographic order
    totals = cost[np.arange(k)[None, :], perms].sum(axis=1)
    best = totals.min()
    winner = perms[int(np.flatnonzero(totals == best)[0])].tolist()
    return winner, float(np.sum(cost[np.arange(k), winner]))


def unit_rows(seed, n, d):
    """Seeded random unit vectors."""
    rows = CounterRng(seed).gaussians(0, n * d).reshape(n, d)
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def random_token_set(seed, count, dim):
    """Fresh TokenSet with seeded gaussian values."""
    values = CounterRng(seed).gaussians(0, count * dim).reshape(count, dim)
    return TokenSet.fresh(values)

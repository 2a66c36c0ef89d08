"""Counter-based pseudo-random generator for reproducible fixtures.

The generator is splitmix64 addressed by counter: output ``i`` of a stream
seeded with ``s`` is ``mix64(s + (i+1) * GOLDEN)`` where ``mix64`` is the
standard xor-shift/multiply finalizer. Any output can be computed without
generating its predecessors, so tensors are reproducible bit-for-bit across
processes and languages. Known-answer test vectors live in
``tests/vectors/rng_vectors.json``.

Derived values:

* ``uniforms``: the top 53 bits of each output, mapped to (0, 1] via
  ``((x >> 11) + 1) * 2**-53`` (never zero, so logs are safe).
* ``gaussians``: Box-Muller, where gaussian ``i`` consumes uniform counters
  ``2i`` and ``2i + 1``: ``sqrt(-2 ln u1) * cos(2 pi u2)``.
* child streams: stream ``k`` of a parent is seeded with the parent's raw
  output ``k``.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


class CounterRng:
    """Random-access splitmix64 stream."""

    def __init__(self, seed: int):
        self.seed = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)

    def raw(self, start: int, n: int) -> np.ndarray:
        """Outputs at counters start..start+n-1 as uint64."""
        idx = np.arange(start + 1, start + n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            return _mix64(self.seed + idx * _GOLDEN)

    def uniforms(self, start: int, n: int) -> np.ndarray:
        """Floats in (0, 1] at uniform counters start..start+n-1."""
        bits = self.raw(start, n) >> np.uint64(11)
        return (bits.astype(np.float64) + 1.0) * 2.0**-53

    def gaussians(self, start: int, n: int) -> np.ndarray:
        """Standard normals at gaussian counters start..start+n-1."""
        u = self.uniforms(2 * start, 2 * n)
        u1, u2 = u[0::2], u[1::2]
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)

    def child(self, k: int) -> "CounterRng":
        """Independent substream k."""
        return CounterRng(int(self.raw(k, 1)[0]))

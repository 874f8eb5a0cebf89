"""Deterministic 64-bit hash streams (splitmix64).

Every random draw in the project (map cells, instance start/goal picks,
heuristic noise, network weights) flows through these functions, so results
are bit-identical across platforms and across the compiled and pure engines.

``stream(seed, i)`` is the i-th output of the canonical splitmix64 generator
seeded with ``seed``: the generator state after i steps is
``seed + (i + 1) * GOLDEN`` and the output is the three-round finalizer of
that state.  Doubles in [0, 1) take the top 53 bits.
"""

from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def mix64(z: int) -> int:
    """splitmix64 finalizer: avalanche a 64-bit value."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def stream(seed: int, index: int) -> int:
    """index-th 64-bit output of splitmix64 seeded with ``seed``."""
    return mix64((seed + ((index + 1) * GOLDEN)) & MASK64)


def unit(seed: int, index: int) -> float:
    """Uniform double in [0, 1) drawn from stream slot ``index``."""
    return (stream(seed, index) >> 11) * _INV_2_53


def stream_at(seed: int, indices: np.ndarray) -> np.ndarray:
    """Vectorized ``stream`` over an array of uint64 indices."""
    idx = indices.astype(np.uint64, copy=False)
    z = np.uint64(seed & MASK64) + (idx + np.uint64(1)) * np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MUL2)
    return z ^ (z >> np.uint64(31))


def unit_at(seed: int, indices: np.ndarray) -> np.ndarray:
    """Vectorized ``unit`` over an array of uint64 indices."""
    return (stream_at(seed, indices) >> np.uint64(11)).astype(np.float64) * _INV_2_53


def unit_block(seed: int, start: int, count: int) -> np.ndarray:
    """``count`` consecutive uniform doubles starting at stream slot ``start``."""
    return unit_at(seed, np.arange(start, start + count, dtype=np.uint64))

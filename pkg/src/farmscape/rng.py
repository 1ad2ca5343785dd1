"""Deterministic, splittable random streams.

Every stochastic decision in the package draws from a stream addressed by
(master_seed, *path), where path elements name the consumer (module tag,
replicate index, sweep index, ...).  Streams are backed by numpy's Philox
counter-based generator; the 128-bit Philox key is derived from the path by
iterated SplitMix64 mixing, so the mapping is stable across platforms,
process counts, and scheduling order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    """One SplitMix64 output step (Steele et al. 2014 finalizer)."""
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _fold(token: int | str) -> int:
    if isinstance(token, str):
        acc = 0x5851F42D4C957F2D
        for chunk in token.encode("utf-8"):
            acc = _splitmix64(acc ^ chunk)
        return acc
    if isinstance(token, (bool, float)):
        raise TypeError(f"stream path tokens must be int or str, got {token!r}")
    return int(token) & _MASK64


def derive_key(master_seed: int, *path: int | str) -> tuple[int, int]:
    """128-bit Philox key for the substream addressed by `path`."""
    state = _splitmix64(int(master_seed) & _MASK64)
    for token in path:
        state = _splitmix64(state ^ _fold(token))
    lo = _splitmix64(state)
    hi = _splitmix64(lo)
    return lo, hi


def stream(master_seed: int, *path: int | str) -> np.random.Generator:
    """Independent Generator for the given substream address."""
    lo, hi = derive_key(master_seed, *path)
    return np.random.Generator(np.random.Philox(key=np.array([lo, hi], dtype=np.uint64)))


def substream_seed(master_seed: int, *path: int | str) -> int:
    """64-bit seed for handing to components that take a plain seed."""
    return derive_key(master_seed, *path)[0]

"""Deterministic randomness for reproducible runs.

One run-level seed; each proposal derives its own stream by gamma-spacing the
seed with the proposal ordinal (splitmix-style stream splitting), so traces
replay byte-identically and adding a policy does not perturb earlier draws.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """The splitmix64 generator (Steele, Lea, Flood constants)."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return (z ^ (z >> 31)) & _MASK64

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling (no modulo bias)."""
        if n <= 0:
            raise ValueError("below() requires n >= 1")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n


def derive_stream(seed: int, index: int) -> SplitMix64:
    """Per-proposal stream: gamma-spaced offset of the run seed by the ordinal."""
    return SplitMix64((seed + _GAMMA * index) & _MASK64)


def shuffled(items, rng: SplitMix64) -> list:
    """Fisher-Yates shuffle (high index down), returning a new list."""
    xs = list(items)
    for i in range(len(xs) - 1, 0, -1):
        j = rng.below(i + 1)
        xs[i], xs[j] = xs[j], xs[i]
    return xs

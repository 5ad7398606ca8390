"""Portable seeded random source.

xoshiro256** state, seeded by four successive outputs of splitmix64 applied
to the user seed. Every draw is defined bit-for-bit so runs with the same seed
agree across platforms and implementations.
"""
from __future__ import annotations

import math
from typing import Sequence

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> tuple[int, int]:
    """One splitmix64 step: returns ``(new_state, output)``."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return x, z ^ (z >> 31)


def derive_seed(seed: int, *keys: int) -> int:
    """Mix integer keys into ``seed``; used for per-episode / per-target seeds."""
    _, s = splitmix64(seed & MASK64)
    for k in keys:
        s, out = splitmix64(s ^ (k & MASK64))
        s = out
    return s


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        s = self.seed & MASK64
        state = []
        for _ in range(4):
            s, out = splitmix64(s)
            state.append(out)
        self._s = state

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def integers(self, n: int) -> int:
        """Uniform integer in ``[0, n)`` (rejection sampling, unbiased)."""
        if n <= 0:
            raise ValueError(f"upper bound must be positive, got {n}")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def random(self) -> float:
        """Uniform float in ``[0, 1)`` with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def normal(self) -> float:
        # Box-Muller, one value per call; 1 - u keeps the log argument in (0, 1]
        u1 = 1.0 - self.random()
        u2 = self.random()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def normals(self, count: int) -> list[float]:
        return [self.normal() for _ in range(count)]

    def categorical(self, probs: Sequence[float]) -> int:
        """Inverse-CDF draw from a probability vector."""
        u = self.random()
        acc = 0.0
        for i, p in enumerate(probs):
            acc += p
            if u < acc:
                return i
        # round-off: fall back to the last index with positive mass
        for i in range(len(probs) - 1, -1, -1):
            if probs[i] > 0:
                return i
        raise ValueError("probability vector has no positive entry")

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates shuffle of ``range(n)``."""
        idx = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.integers(i + 1)
            idx[i], idx[j] = idx[j], idx[i]
        return idx

    def getstate(self) -> tuple[int, ...]:
        return tuple(self._s)

    def setstate(self, state: Sequence[int]) -> None:
        self._s = [int(x) & MASK64 for x in state]


def make_rng(seed: int) -> Xoshiro256:
    return Xoshiro256(seed)

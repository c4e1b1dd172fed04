"""Seeded deterministic random generator for the random-verbalizer baseline.

SplitMix64 (Steele, Lea & Flood 2014): state advances by the 64-bit constant
0x9E3779B97F4A7C15 and each output is finalized with the multipliers
0xBF58476D1CE4E5B9 and 0x94D049BB133111EB. Pure integer arithmetic, so the
stream is identical on every platform.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection, bias-free."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % bound

    def sample(self, population: list, count: int) -> list:
        """``count`` distinct elements via a partial Fisher-Yates shuffle."""
        if count > len(population):
            raise ValueError("sample larger than population")
        pool = list(population)
        for i in range(count):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:count]

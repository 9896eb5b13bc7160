"""Portable seeded randomness.

Every stochastic component in the package draws from :class:`PortableRNG`, a
SplitMix64 generator.  Unlike library bit generators, its output stream is
fixed by this file alone, so a stored seed reproduces the same task sets and
initializations on any platform or dependency version.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1


def derive_seed(seed: int, component: str) -> int:
    """Derive a sub-seed: ``seed`` XOR the FNV-1a hash of ``component``."""
    h = 0xCBF29CE484222325
    for byte in component.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & _MASK64
    return (seed ^ h) & _MASK64


class PortableRNG:
    """SplitMix64 stream with uniform/normal/integer helpers."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64
        self._spare_normal: float | None = None

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        # 53-bit mantissa -> double in [0, 1)
        u = self.next_u64() >> 11
        return lo + (hi - lo) * (u * (1.0 / (1 << 53)))

    def normal(self, mean: float = 0.0, std: float = 1.0) -> float:
        # Box-Muller; caches the second deviate.
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
            return mean + std * z
        u1 = self.uniform()
        while u1 <= 0.0:
            u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare_normal = r * math.sin(2.0 * math.pi * u2)
        return mean + std * r * math.cos(2.0 * math.pi * u2)

    def integer(self, n: int) -> int:
        """Uniform integer in [0, n) without modulo bias."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (_MASK64 + 1) - ((_MASK64 + 1) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.integer(i + 1)
            items[i], items[j] = items[j], items[i]

    def spawn(self, component: str) -> "PortableRNG":
        """Independent stream for a named sub-component."""
        return PortableRNG(derive_seed(self.next_u64(), component))

"""Portable, counter-based pseudo-random numbers (SplitMix64).

All stochastic output of this library is a pure function of explicit 64-bit
seeds so that identical seeds give identical streams on every platform and
in every implementation language. The generator is SplitMix64 with the
standard constants:

    output(seed, k) = mix64((seed + (k + 1) * 0x9E3779B97F4A7C15) mod 2^64)

    mix64(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9  (mod 2^64)
              z ^= z >> 27; z *= 0x94D049BB133111EB  (mod 2^64)
              return z ^ (z >> 31)

``k`` is the zero-based draw counter, so the stream is random-access and
trivially vectorizable. Uniform doubles take the top 53 bits:
``u = (output >> 11) * 2**-53 in [0, 1)``.

Derived seeds (per experiment cell, per observable, ...) use the documented
mixing rule ``derive_seed``: starting from the base seed, fold in each index
with ``h = mix64((h ^ index) + 0x9E3779B97F4A7C15)``.
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_U53_SCALE = 2.0**-53


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, *indices: int) -> int:
    """Derive an independent child seed from a base seed and index tuple.

    Rule: ``h = base; for ix in indices: h = mix64((h ^ ix) + GOLDEN)``.
    Used to assign disjoint streams to scan cells, observables, splits and
    samples so work can be reordered or parallelized without changing
    results.
    """
    h = base_seed & MASK64
    for ix in indices:
        h = mix64(((h ^ (ix & MASK64)) + GOLDEN) & MASK64)
    return h


def _mix64_array(z: np.ndarray) -> np.ndarray:
    # uint64 array arithmetic wraps mod 2^64, matching the scalar path.
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Stateful view over the counter-based stream for one seed.

    The instance only tracks how many draws were consumed; the values
    themselves depend on ``(seed, draw index)`` alone.
    """

    def __init__(self, seed: int) -> None:
        self.seed = seed & MASK64
        self._count = 0

    def next_u64(self) -> int:
        self._count += 1
        return mix64((self.seed + self._count * GOLDEN) & MASK64)

    def uniform(self) -> float:
        """One double in [0, 1)."""
        return (self.next_u64() >> 11) * _U53_SCALE

    def uniforms(self, n: int) -> np.ndarray:
        """``n`` doubles in [0, 1), consuming ``n`` counter positions."""
        if n < 0:
            raise ValueError("n must be >= 0")
        ks = np.arange(self._count + 1, self._count + n + 1, dtype=np.uint64)
        self._count += n
        states = np.uint64(self.seed) + ks * np.uint64(GOLDEN)
        return (_mix64_array(states) >> np.uint64(11)) * _U53_SCALE

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n) as floor(u * n); bias < n * 2^-53."""
        if n <= 0:
            raise ValueError("n must be positive")
        return min(int(self.uniform() * n), n - 1)

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates permutation of range(n)."""
        items = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def sample_sorted(self, n: int, k: int) -> tuple[int, ...]:
        """k distinct indices from range(n), uniform, returned ascending."""
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        return tuple(sorted(self.permutation(n)[:k]))

    def normals(self, n: int) -> np.ndarray:
        """``n`` standard normals via Box-Muller on stream uniforms."""
        pairs = (n + 1) // 2
        u = self.uniforms(2 * pairs).reshape(pairs, 2)
        r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        theta = 2.0 * math.pi * u[:, 1]
        out = np.concatenate([r * np.cos(theta), r * np.sin(theta)])
        return out[:n]

    def spawn(self, *indices: int) -> "SplitMix64":
        """Child generator seeded with ``derive_seed(self.seed, *indices)``."""
        return SplitMix64(derive_seed(self.seed, *indices))

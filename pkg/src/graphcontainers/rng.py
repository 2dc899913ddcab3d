"""Seeded randomness built only on raw PCG64 output.

Only ``PCG64.random_raw`` is used: the bit stream of the PCG64 generator and
the ``SeedSequence`` seeding are fixed algorithms, whereas numpy's
``Generator`` sampling methods may change between releases. Bounded integers,
Bernoulli draws and subset sampling are derived from the raw words here so
instances replay bit-for-bit across platforms and numpy versions.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

_TWO64 = 1 << 64
MASK64 = _TWO64 - 1


class Rng:
    """Independent 64-bit stream for ``(seed, *key)``."""

    def __init__(self, seed: int, *key: int):
        if not 0 <= seed <= MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self.key = key
        self._bg = np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key))

    def raw(self, size: int) -> np.ndarray:
        return self._bg.random_raw(size)

    def word(self) -> int:
        return int(self._bg.random_raw())

    def below(self, k: int) -> int:
        """Uniform integer in ``[0, k)`` by rejection."""
        if k <= 0:
            raise ValueError("below() needs a positive bound")
        limit = _TWO64 - _TWO64 % k
        while True:
            u = self.word()
            if u < limit:
                return u % k

    def sample(self, n: int, s: int) -> list[int]:
        """Uniform ``s``-subset of ``range(n)`` (partial Fisher-Yates), sorted."""
        if not 0 <= s <= n:
            raise ValueError(f"cannot sample {s} of {n} without replacement")
        pool = list(range(n))
        for i in range(s):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return sorted(pool[:s])

    def bernoulli(self, p: Fraction, size: int) -> np.ndarray:
        """``size`` independent draws, each True with probability ``p`` (to within 2**-64)."""
        return self.raw(size) < bernoulli_threshold(p) if p < 1 else np.ones(size, dtype=bool)


def bernoulli_threshold(p: Fraction) -> np.uint64:
    # u < ceil(p * 2^64)  <=>  u < p * 2^64 for integer u
    a, b = p.numerator, p.denominator
    return np.uint64(-(-a * _TWO64 // b))


def derive_seed(seed: int, *key: int) -> int:
    """A 64-bit child seed, stable for ``(seed, *key)``."""
    state = np.random.SeedSequence(seed, spawn_key=key).generate_state(2, np.uint32)
    return int(state[0]) | int(state[1]) << 32

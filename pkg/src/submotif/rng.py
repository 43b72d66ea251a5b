"""Seeded random stream shared by the Python code paths and the compiled walker.

Every scalar draw is derived from raw 64-bit outputs of a single PCG64 bit
generator, using the same arithmetic as the compiled kernel, so the two
backends consume identical streams and return identical results.
"""
from __future__ import annotations

import numpy as np

TWO64 = 1 << 64
_INV53 = 1.0 / 9007199254740992.0

DEFAULT_SEED = 20240601


class RandomStream:
    """Scalar draws over a PCG64 bit generator plus a numpy Generator view.

    The numpy ``generator`` shares the bit generator state, so vectorized
    draws and scalar draws interleave deterministically.
    """

    def __init__(self, seed: int | None = DEFAULT_SEED):
        self.seed = seed
        self.bitgen = np.random.PCG64(seed)
        self.generator = np.random.Generator(self.bitgen)
        self._raw = self.bitgen.random_raw

    def raw(self) -> int:
        return self._raw()

    def integer(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection on raw 64-bit words."""
        if n <= 0:
            raise ValueError("integer range must be positive")
        limit = TWO64 - (TWO64 % n)
        raw = self._raw
        while True:
            x = raw()
            if x < limit:
                return x % n

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self._raw() >> 11) * _INV53

    def bernoulli(self, p: float) -> bool:
        return (self._raw() >> 11) * _INV53 < p

    def child(self, index: int) -> "RandomStream":
        """Independent stream derived from this stream's seed and an index."""
        base = 0 if self.seed is None else int(self.seed)
        ss = np.random.SeedSequence([base & (TWO64 - 1), int(index)])
        return RandomStream(int(ss.generate_state(1, dtype=np.uint64)[0]))


def as_stream(rng) -> RandomStream:
    """Accept a RandomStream, an integer seed, or None."""
    if isinstance(rng, RandomStream):
        return rng
    return RandomStream(DEFAULT_SEED if rng is None else int(rng))

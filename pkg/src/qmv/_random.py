"""Seed handling shared by every randomized routine.

All randomness is drawn from numpy's PCG64 generator.  Child seeds are
derived with ``numpy.random.SeedSequence`` so that ``derive_seed(s, a, b)``
is a fixed, platform-independent function of its arguments.
"""

from __future__ import annotations

import numpy as np

RNG_ALGORITHM = "numpy.PCG64 + SeedSequence"


def derive_seed(seed: int, *keys: int) -> int:
    """Mix ``seed`` with integer keys into an independent 64-bit seed."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) & 0xFFFFFFFFFFFFFFFF for k in keys]
    state = np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)
    return int(state[0])


def as_generator(seed) -> np.random.Generator:
    """Accept an int seed, ``None`` or an existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def child_generator(rng: np.random.Generator) -> np.random.Generator:
    """Split off an independent generator consuming one draw of ``rng``."""
    return np.random.Generator(np.random.PCG64(int(rng.integers(0, 2**63))))

"""Seed handling and stream derivation.

Every random draw in a sweep comes from ``SeedSequence(master, spawn_key=key)``
where ``key`` is a tuple of small integers: the stream purpose first, then any
extra identifiers (trial index, grid-point index). The same ``(master, key)``
always yields the same stream, independent of execution order or thread count.
"""

from __future__ import annotations

import numpy as np

SYMBOLS = 0
NOISE = 1
PHASE = 2


def stream(master: int, *key: int) -> np.random.SeedSequence:
    """Seed sequence for stream ``key`` under ``master``."""
    return np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in key))


def as_generator(seed) -> np.random.Generator:
    """Coerce an int, SeedSequence, Generator or None to a Generator.

    A Generator passed in is used as-is, so callers that want an unchanged
    state must pass a seed instead.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)

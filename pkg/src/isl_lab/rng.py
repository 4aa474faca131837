"""Seeded random streams.

All randomness in the library flows from a single root seed expanded into
named streams, so any one component (sampling, init, subsets, projections)
is reproducible in isolation.
"""

from __future__ import annotations

import numpy as np

# Fixed stream ids for the named sources of randomness.
STREAM_DATA = 1
STREAM_INIT = 2
STREAM_NOISE = 3
STREAM_SUBSETS = 4
STREAM_PROJECTIONS = 5
STREAM_EVAL = 6


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for (seed, stream); same pair gives the same sequence."""
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream must be nonnegative")
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(stream,)))

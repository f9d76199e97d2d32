"""Seed bookkeeping for reproducible, schedule-independent randomness.

A seed is either a non-negative integer or a tuple ``(entropy, k1, k2, ...)``
naming a node in a :class:`numpy.random.SeedSequence` spawn tree. Child
streams are addressed by appending integer keys, so stream ``(seed, j)`` is
the same no matter which worker asks for it or in what order.
"""

from __future__ import annotations

from typing import Union

import numpy as np

Seed = Union[int, tuple, list]

# Fixed stream identifiers; appended to the seed path to keep families apart.
STREAM_PERMUTATIONS = 1
STREAM_OUTCOMES = 2
STREAM_TRUE_GC = 3
STREAM_GRAPH = 4
STREAM_REPLICATIONS = 5


def seed_path(seed: Seed, *keys: int) -> tuple:
    """Normalize ``seed`` and extend it with ``keys``."""
    if isinstance(seed, (tuple, list)):
        path = tuple(int(k) for k in seed)
        if not path:
            raise ValueError("empty seed path")
    elif seed is None:
        raise ValueError("a seed is required for reproducible runs")
    else:
        path = (int(seed),)
    if any(k < 0 for k in path) or any(int(k) < 0 for k in keys):
        raise ValueError("seed components must be non-negative")
    return path + tuple(int(k) for k in keys)


def seed_sequence(seed: Seed, *keys: int) -> np.random.SeedSequence:
    path = seed_path(seed, *keys)
    return np.random.SeedSequence(entropy=path[0], spawn_key=path[1:])


def substream(seed: Seed, *keys: int) -> np.random.Generator:
    """Independent generator for the stream addressed by ``seed`` + ``keys``."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *keys)))

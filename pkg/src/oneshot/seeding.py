"""Seed handling: one master seed, independent labelled substreams."""
from __future__ import annotations

import zlib

import numpy as np


def as_generator(seed=None) -> np.random.Generator:
    """Turn ``seed`` (None, int, SeedSequence or Generator) into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _label(part) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError("stream labels must be non-negative")
        return int(part)
    return zlib.crc32(str(part).encode())


def stream(seed: int, *labels) -> np.random.Generator:
    """Generator for the substream ``labels`` of the master ``seed``.

    Identical ``(seed, labels)`` always gives the same stream; distinct labels
    give statistically independent streams (``SeedSequence`` spawn keys).
    Strings are hashed with CRC-32 so labels stay stable across processes.
    """
    if seed < 0 or seed >= 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    key = tuple(_label(p) for p in labels)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))

"""Seeded random streams.

Every stochastic routine draws from ``derive_rng(seed, *key)``: a PCG64
generator seeded by ``SeedSequence(seed, spawn_key=key)`` where string
parts of the key are mapped through CRC32. The same (seed, key) always
gives the same stream, and distinct keys give independent streams.
"""
import zlib

import numpy as np

GENERATOR_NAME = "numpy.random.PCG64/SeedSequence(seed, spawn_key=crc32-tags)"


def _key_part(part):
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    return int(part)


def derive_rng(seed, *key):
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(_key_part(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))

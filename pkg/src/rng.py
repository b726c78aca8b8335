"""
Seeded random streams.

Every random draw in the package comes from a numpy Generator backed by the
counter-based Philox bit generator. Independent streams are derived from
(seed, key...) through SeedSequence spawn keys, so a stream depends only on
its keys and never on how many draws other streams made.
"""

import hashlib
from typing import Union

import numpy as np

Key = Union[int, str]


def _key_to_int(key: Key) -> int:
    if isinstance(key, (int, np.integer)):
        if key < 0:
            raise ValueError(f"stream keys must be non-negative, got {key}")
        return int(key)
    digest = hashlib.sha256(str(key).encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "little")


def derive_rng(seed: int, *keys: Key) -> np.random.Generator:
    """Generator for the stream named by ``keys`` under ``seed``."""
    spawn_key = tuple(_key_to_int(k) for k in keys)
    sequence = np.random.SeedSequence(int(seed), spawn_key=spawn_key)
    return np.random.Generator(np.random.Philox(sequence))

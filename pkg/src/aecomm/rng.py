"""Deterministic random-stream derivation.

Every random draw in the package flows from one top-level integer seed
through named substreams, so any subsystem (training, model init, channel
noise, block-error simulation) can be re-seeded or re-run independently of
the others.  A substream is addressed by a tuple of ints and strings, e.g.
``substream(seed, "bler", "hamming-hard", "4.5", chunk_index)``.
"""

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _key_to_int(key) -> int:
    if isinstance(key, str):
        digest = hashlib.sha256(key.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "little")
    if isinstance(key, (int, np.integer)):
        return int(key) & _MASK64
    raise TypeError(f"substream keys must be int or str, got {type(key).__name__}")


def substream(*keys) -> np.random.Generator:
    """Derive an independent Generator from a tuple of int/str keys.

    The mapping is stable across processes and platforms (string keys are
    hashed with SHA-256, not Python's salted hash).
    """
    if not keys:
        raise ValueError("substream needs at least one key")
    entropy = [_key_to_int(k) for k in keys]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))

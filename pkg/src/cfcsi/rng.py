"""Deterministic derivation of independent random substreams.

A single master seed plus a purpose key ("placement", "shadowing", trial
indices, ...) yields a reproducible, statistically independent generator, so
any component of a run can be re-executed in isolation and removing one
consumer never shifts the draws seen by another.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _key_word(part) -> int:
    if isinstance(part, (bool, float)):
        raise TypeError(f"stream key parts must be int or str, got {type(part).__name__}")
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError("integer stream key parts must be non-negative")
        return int(part)
    if isinstance(part, str):
        digest = hashlib.blake2s(part.encode("utf-8"), digest_size=4).digest()
        return int.from_bytes(digest, "little")
    raise TypeError(f"stream key parts must be int or str, got {type(part).__name__}")


def substream(master_seed: int, *key) -> np.random.Generator:
    """Generator for the substream identified by `key` under `master_seed`."""
    entropy = [_key_word(master_seed)] + [_key_word(p) for p in key]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(master_seed: int, *key) -> int:
    """Stable 63-bit sub-seed, e.g. one per sweep point."""
    h = hashlib.blake2s(digest_size=8)
    h.update(str(int(master_seed)).encode())
    for part in key:
        h.update(b"\x1f")
        h.update(str(part).encode("utf-8"))
    return int.from_bytes(h.digest(), "little") >> 1

"""Deterministic seed derivation for the (master seed -> dataset -> fold -> task) tree.

Every random choice in the pipeline draws from a stream derived here, so
results do not depend on execution order or parallelism.
"""
from __future__ import annotations

import hashlib

import numpy as np

_MASK = (1 << 64) - 1


def derive_seed(*parts: int | str) -> int:
    """Collapse a mixed tuple of ints/strings into one 63-bit seed.

    Strings are hashed with SHA-256 so dataset/classifier ids can be part
    of the derivation path; the result is stable across platforms and runs.
    """
    material = []
    for part in parts:
        if isinstance(part, str):
            digest = hashlib.sha256(part.encode("utf-8")).digest()
            material.append(int.from_bytes(digest[:8], "little"))
        elif isinstance(part, (int, np.integer)):
            material.append(int(part) & _MASK)
        else:
            raise TypeError(f"cannot derive a seed from {type(part).__name__}")
    state = np.random.SeedSequence(material).generate_state(1, np.uint64)[0]
    return int(state) >> 1  # keep it valid as a signed 64-bit seed


def rng_from(*parts: int | str) -> np.random.Generator:
    """A fresh Generator seeded from the derivation path ``parts``."""
    return np.random.default_rng(derive_seed(*parts))

"""Deterministic derivation of named random substreams from one top-level seed.

Every randomized stage (generation, diversification, sampling, tie-breaking)
pulls its generator from here, keyed by stage name and sample labels, so
stages can re-run independently and still reproduce bit-identical output.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(seed: int, *labels: object) -> int:
    """Derive a 64-bit substream seed from ``seed`` and a label path."""
    key = repr((int(seed),) + tuple(labels)).encode("utf-8")
    digest = hashlib.sha256(key).digest()
    return int.from_bytes(digest[:8], "big")


def substream(seed: int, *labels: object) -> np.random.Generator:
    """Independent generator for one named stage or sample."""
    return np.random.default_rng(derive_seed(seed, *labels))

"""Deterministic per-purpose RNG derivation.

Every random draw in the package comes from a generator derived from
(root seed, purpose tag, indices...) so that runs replay bit-identically and
streams for different purposes never interleave.
"""
import numpy as np

_PURPOSES = {
    "topology": 1,
    "workload": 2,
    "mobility": 3,
    "requests": 4,
    "channel": 5,
    "content_esn": 6,
    "mobility_esn": 7,
    "random_cache": 8,
    "sampling": 9,
    "memcap": 10,
    "reservoir": 11,
    "distance": 12,
}


def rng_for(seed, purpose, *indices):
    """Generator for (seed, purpose, *indices); purpose from the fixed table."""
    tag = _PURPOSES[purpose]
    words = [int(seed) & 0xFFFFFFFF, tag, *(int(i) & 0xFFFFFFFF for i in indices)]
    return np.random.default_rng(np.random.SeedSequence(words))

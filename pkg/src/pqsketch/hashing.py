"""Seeded 64-bit mixing used for bucket placement and seed derivation.

Everything downstream of the one user-supplied seed (counter-array hashes,
bucket placement, per-cell calibration streams, synthetic data) is derived
through these functions, so two runs with the same seed replay bit for bit.
"""
from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xFF51AFD7ED558CCD
_MIX2 = 0xC4CEB9FE1A85EC53


def mix64(x: int) -> int:
    """Finalizing 64-bit avalanche mix. Every input bit affects every output bit."""
    x &= _MASK
    x ^= x >> 33
    x = (x * _MIX1) & _MASK
    x ^= x >> 33
    x = (x * _MIX2) & _MASK
    x ^= x >> 33
    return x


def hash_key(key: int, seed: int) -> int:
    """Seeded hash of an integer key onto 64 bits."""
    return mix64((key + seed) & _MASK)


def child_seed(seed: int, index: int) -> int:
    """Derive the index-th child seed from a parent seed.

    Splitmix-style: advance by a multiple of the golden-ratio increment, then
    mix. Children of one parent are pairwise uncorrelated for practical use.
    """
    return mix64((seed + (index + 1) * _GOLDEN) & _MASK)


def cell_seed(seed: int, bucket_index: int, generation: int) -> int:
    """Seed for the estimator installed in a cell.

    Folds the bucket index and the sketch-wide claim counter through the mixer
    so no two cell claims ever share a calibration stream, while staying a pure
    function of the run seed.
    """
    return mix64(mix64((seed ^ (bucket_index * _MIX2)) & _MASK) ^ ((generation * _MIX1) & _MASK))

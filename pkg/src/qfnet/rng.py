"""Seeded, portable random number generation.

Everything random in this package flows through splitmix64, a counter-based
64-bit mixer (Steele, Lea & Flood 2014; the same finalizer Java's
SplittableRandom uses).  Output i is a pure function of (seed, i), so streams
are bit-reproducible on every platform and can be generated vectorized or in
any order.  Uniform doubles take the top 53 bits of each word.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


def splitmix64(seed: int, index: int) -> int:
    """The index-th output word of the splitmix64 stream with the given seed."""
    return _mix((seed + (index + 1) * _GOLDEN) & _MASK)


def _mix_u64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def random_words(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Words offset..offset+count-1 of the stream, as uint64."""
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix_u64(np.uint64(seed & _MASK) + idx * np.uint64(_GOLDEN))


def random_uniform(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """count doubles uniform on [0, 1), from the top 53 bits of each word."""
    return (random_words(seed, count, offset) >> np.uint64(11)) * 2.0 ** -53


def hash_fields(*fields) -> int:
    """Fold strings/integers into a single 64-bit seed.

    Used to derive independent substreams, e.g. one per (seed, metric, pair).
    Strings hash via FNV-1a before mixing so the result does not depend on
    Python's randomized str hash.
    """
    state = 0x9AFB0D5E5D2F31A7
    for field in fields:
        if isinstance(field, str):
            h = 0xCBF29CE484222325
            for b in field.encode("utf-8"):
                h = ((h ^ b) * 0x100000001B3) & _MASK
            word = h
        else:
            word = int(field) & _MASK
        state = _mix((state ^ word) * _GOLDEN & _MASK)
    return state


def permutation(seed: int, n: int) -> np.ndarray:
    """A uniform random permutation of range(n) via seeded Fisher-Yates."""
    u = random_uniform(seed, max(n - 1, 0))
    perm = np.arange(n)
    for i in range(n - 1, 0, -1):
        j = int(u[n - 1 - i] * (i + 1))  # uniform in 0..i
        perm[i], perm[j] = perm[j], perm[i]
    return perm

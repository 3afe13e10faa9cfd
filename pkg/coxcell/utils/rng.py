"""
Counter-based random streams: one independent Philox stream per (seed, trial)
"""

import numpy as np

from coxcell.core.exceptions import ValidationException

_UINT64 = 1 << 64


def validate_seed(seed: int) -> int:
    """Master seeds are unsigned 64-bit integers"""
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise ValidationException(f"seed must be an integer, got {seed!r}", field="seed")
    if not 0 <= seed < _UINT64:
        raise ValidationException("seed must lie in [0, 2**64)", field="seed")
    return seed


def trial_stream(seed: int, trial: int) -> np.random.Generator:
    """Generator for one trial; the 128-bit Philox key packs seed (high) and trial (low).

    Trial t draws the same numbers whatever chunking or thread count produced it.
    """
    if not 0 <= trial < _UINT64:
        raise ValidationException("trial index must lie in [0, 2**64)", field="trial")
    key = (validate_seed(seed) << 64) | int(trial)
    return np.random.Generator(np.random.Philox(key=key))


def derived_seed(seed: int, offset: int) -> int:
    """Master seed of an independent sub-run; wraps modulo 2**64"""
    return (validate_seed(seed) + int(offset)) % _UINT64

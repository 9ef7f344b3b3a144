"""Counter-based random numbers (splitmix64).

Every random draw in the package is a pure function of (seed, stream,
counter), so results never depend on call order, chunking, or thread
scheduling.  `derive_key` folds small stream identifiers into a 64-bit
key; `uniforms` turns a key plus an array of counters into floats in
[0, 1).
"""

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15


def _finalize_int(z):
    # splitmix64 output stage, pure-Python ints (no numpy scalar overflow warnings)
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_key(seed, *words):
    """Derive a 64-bit stream key from a seed and small integer ids."""
    k = int(seed) & _MASK
    for w in words:
        k = _finalize_int((k + _GAMMA + int(w)) & _MASK)
    return k


def uniforms(key, counters):
    """Uniform [0, 1) floats for an array of 64-bit counters under `key`.

    Vectorized splitmix64: state = key + (counter + 1) * gamma, output
    finalized and mapped to the top 53 bits.
    """
    c = np.asarray(counters, dtype=np.uint64)
    z = np.uint64(key) + (c + np.uint64(1)) * np.uint64(_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * (2.0**-53)

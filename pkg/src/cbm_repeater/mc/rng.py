"""Counter-based random numbers keyed by (seed, trial, site).

Every draw is a pure function of its key, so trials can run in any order or
in parallel and still reproduce bit-for-bit.  The trial key is a SplitMix64
finaliser cascade over (seed, trial); each site is then the site-th output
of the SplitMix64 sequence started at that key.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

_GOLDEN = uint64(0x9E3779B97F4A7C15)
_M1 = uint64(0xBF58476D1CE4E5B9)
_M2 = uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> uint64(30))) * _M1
    z = (z ^ (z >> uint64(27))) * _M2
    return z ^ (z >> uint64(31))


@njit(cache=True, inline="always")
def trial_key(seed, trial):
    return mix64(mix64(uint64(seed) + _GOLDEN) ^ (uint64(trial) * _GOLDEN + _M1))


@njit(cache=True, inline="always")
def uniform(key, site):
    """Uniform double in [0, 1) for ``site`` under a trial ``key``."""
    h = mix64(key + uint64(site) * _GOLDEN)
    return float(h >> uint64(11)) * _INV53


def uniforms(seed: int, trial: int, sites) -> np.ndarray:
    """Python-side helper mostly for tests."""
    key = np.uint64(trial_key(np.uint64(seed), np.uint64(trial)))
    return np.array([uniform(key, np.uint64(s)) for s in sites])

"""Deterministic xoshiro256** random streams for reproducible chains.

Each Markov chain owns a private generator state (four uint64 words) so
runs are bitwise reproducible regardless of scheduling.  Chain seeds are
derived from the base seed with a splitmix64 hash, which keeps adjacent
integer seeds uncorrelated.
"""

import numpy as np
from numba import njit, uint64

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(cache=True)
def splitmix64(seed, k):
    """k-th output of the splitmix64 stream seeded with `seed`."""
    return _mix(uint64(seed) + (uint64(k) + uint64(1)) * _GOLDEN)


def chain_seed(base_seed: int, chain_index: int) -> int:
    """64-bit seed for chain number `chain_index` of an experiment."""
    return int(splitmix64(np.uint64(base_seed & 0xFFFFFFFFFFFFFFFF), np.uint64(chain_index)))


@njit(cache=True)
def seed_state(seed):
    """Expand a 64-bit seed into a xoshiro256** state vector."""
    s = np.empty(4, np.uint64)
    for i in range(4):
        s[i] = splitmix64(seed, i)
    if s[0] | s[1] | s[2] | s[3] == uint64(0):
        s[0] = _GOLDEN
    return s


@njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << k) | (x >> (uint64(64) - k))


@njit(cache=True, inline="always")
def next_u64(s):
    result = _rotl(s[1] * uint64(5), uint64(7)) * uint64(9)
    t = s[1] << uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], uint64(45))
    return result


@njit(cache=True, inline="always")
def next_double(s):
    """Uniform double in [0, 1) with 53 random bits."""
    return (next_u64(s) >> uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True, inline="always")
def next_below(s, n):
    """Uniform integer in [0, n).  Bias is O(n/2^53), negligible here."""
    return int(next_double(s) * n)

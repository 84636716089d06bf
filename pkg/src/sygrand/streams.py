"""Counter-based random streams.

Every Monte Carlo trial draws from its own stream, keyed by
``(master_seed, point_index, trial_index)``. Draw ``i`` of a stream is
``splitmix64(key + (i + 1) * GOLDEN)``, so any trial can be regenerated in
isolation and results do not depend on how trials are scheduled.

Normals come from Box-Muller on consecutive draw pairs; message bits are the
low bits of successive draws, 64 per draw.
"""

import math

import numpy as np
from numba import njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_POINT_SALT = np.uint64(0xD1B54A32D192ED03)
_TRIAL_SALT = np.uint64(0x8CB92BA72F3D8DD7)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True)
def mix64(z):
    z = np.uint64(z)
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def trial_key(seed, point, trial):
    k = mix64(np.uint64(seed) + GOLDEN)
    k = mix64(k ^ (np.uint64(point) * _POINT_SALT))
    return mix64(k ^ (np.uint64(trial) * _TRIAL_SALT))


@njit(cache=True)
def draw(key, i):
    return mix64(np.uint64(key) + np.uint64(i + 1) * GOLDEN)


@njit(cache=True)
def draw_bits(key, offset, out):
    """Fill ``out`` (uint8) with bits; uses draws ``offset, offset+1, ...``.
    Returns the next unused draw index."""
    i = offset
    word = np.uint64(0)
    for j in range(out.size):
        if j % 64 == 0:
            word = draw(key, i)
            i += 1
        out[j] = np.uint8(word & np.uint64(1))
        word >>= np.uint64(1)
    return i


@njit(cache=True)
def draw_normals(key, offset, out):
    """Fill ``out`` with standard normals via Box-Muller. Returns the next
    unused draw index."""
    i = offset
    j = 0
    n = out.size
    while j < n:
        a = draw(key, i)
        b = draw(key, i + 1)
        i += 2
        # u1 in (0, 1], u2 in [0, 1)
        u1 = (float(a >> np.uint64(11)) + 1.0) * _INV_2_53
        u2 = float(b >> np.uint64(11)) * _INV_2_53
        r = math.sqrt(-2.0 * math.log(u1))
        out[j] = r * math.cos(2.0 * math.pi * u2)
        if j + 1 < n:
            out[j + 1] = r * math.sin(2.0 * math.pi * u2)
        j += 2
    return i

"""Reproducible seed derivation.

Every random draw in the package comes from ``numpy.random.Generator(PCG64(s))``
where ``s`` is a 64-bit integer.  Sub-streams are derived with

    mix(base, index) = splitmix64(base XOR splitmix64(index))

so a trial's stream depends only on ``(base_seed, trial_index)`` and never on
which worker thread happened to run it.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    z = (int(x) + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix(base: int, index: int) -> int:
    return splitmix64((int(base) & MASK64) ^ splitmix64(index))


def derive_seed(base: int, *path: int) -> int:
    """Fold a path of integer labels into ``base`` with repeated :func:`mix`."""
    s = int(base) & MASK64
    for p in path:
        s = mix(s, p)
    return s


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))


# stream labels used inside one trial
STREAM_A = 1
STREAM_B = 2
STREAM_POWER = 3
STREAM_SIGNS = 4
STREAM_GAUSS = 5
STREAM_COPY = 6

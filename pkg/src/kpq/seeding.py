"""Deterministic seed derivation for sample-parallel experiments.

A master seed is split into per-sample seeds with splitmix64, so samples can
be computed in any order (or concurrently) and still reproduce bit-identically.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> int:
    """One splitmix64 step: returns the mixed output for the given state."""
    z = (state + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def derive_seed(master: int, index: int) -> int:
    """Seed for sample `index` under master seed `master`."""
    return splitmix64(splitmix64(master & _MASK) ^ splitmix64((index + 1) & _MASK))


def sample_rng(master: int, index: int) -> np.random.Generator:
    """Independent generator for one sample; order of construction is irrelevant."""
    return np.random.Generator(np.random.PCG64(derive_seed(master, index)))

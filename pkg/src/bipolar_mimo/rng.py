"""Counter-based random streams.

Every random draw in the simulator comes from a Philox generator whose key
is derived from ``(master_seed, realization_index, stream)``. A realization
therefore sees the same numbers no matter which worker evaluates it.
"""

from __future__ import annotations

import numpy as np

GEOMETRY_STREAM = 0
CHANNEL_STREAM = 1


def derive_seed(master_seed: int, *keys: int) -> int:
    """64-bit child seed for the given key path under ``master_seed``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Circularly-symmetric CN(0, 1) samples (real and imaginary parts N(0, 1/2))."""
    z = rng.standard_normal(shape + (2,) if isinstance(shape, tuple) else (shape, 2))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)

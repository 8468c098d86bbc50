"""Rayleigh MIMO channels from every transmitter to the typical receiver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import NetworkRealization
from .rng import complex_normal, make_rng


@dataclass(frozen=True)
class ChannelSet:
    """Channel matrices seen by the typical receiver.

    ``stacked`` holds the interferer matrices side by side
    (``n_r x sum(n_t)``); ``offsets[l]`` is the first column of interferer
    ``l``.
    """

    direct: np.ndarray
    stacked: np.ndarray
    offsets: np.ndarray

    @property
    def n_r(self) -> int:
        return self.direct.shape[0]

    @property
    def interferer_channels(self) -> list[np.ndarray]:
        bounds = list(self.offsets) + [self.stacked.shape[1]]
        return [self.stacked[:, bounds[i]:bounds[i + 1]] for i in range(len(self.offsets))]

    def interferer(self, index: int) -> np.ndarray:
        stop = self.offsets[index + 1] if index + 1 < len(self.offsets) else self.stacked.shape[1]
        return self.stacked[:, self.offsets[index]:stop]


def sample_channels(realization: NetworkRealization, n_r: int, seed: int) -> ChannelSet:
    """i.i.d. CN(0, 1) entries for the direct link and every interferer."""
    rng = make_rng(seed)
    n_t = realization.interferer_n_t
    total = int(n_t.sum())
    block = complex_normal(rng, (n_r, realization.typical_n_t + total))
    offsets = np.concatenate(([0], np.cumsum(n_t)[:-1])).astype(np.int64) if n_t.size else np.zeros(0, np.int64)
    return ChannelSet(
        direct=block[:, : realization.typical_n_t],
        stacked=block[:, realization.typical_n_t:],
        offsets=offsets,
    )


def fading_power(rng: np.random.Generator, shape, dof_half: int | float) -> np.ndarray:
    """Unit-mean-per-dimension chi-squared powers, i.e. Gamma(dof_half, 1)."""
    return rng.standard_gamma(dof_half, size=shape)

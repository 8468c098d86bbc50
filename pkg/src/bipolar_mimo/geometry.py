"""Poisson bipolar topology seen from the typical receiver at the origin."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .errors import ConfigError, InsufficientInterferers
from .rng import make_rng

DEFAULT_WINDOW = 500.0


@dataclass(frozen=True)
class NetworkRealization:
    """One sampled topology.

    Interferers are stored as parallel arrays sorted by distance to the
    origin; the sort is stable so equal distances keep insertion order.
    """

    typical_link_distance: float
    typical_n_t: int
    interferer_distances: np.ndarray
    interferer_n_t: np.ndarray
    window_radius: float

    @property
    def n_interferers(self) -> int:
        return int(self.interferer_distances.size)

    @property
    def interferers(self) -> list[tuple[float, int]]:
        return list(zip(self.interferer_distances.tolist(), self.interferer_n_t.tolist()))


def link_distance_quantile(u, r_d: float):
    """Inverse CDF of the ring-uniform link distance on ``[1, r_d]``."""
    return np.sqrt(1.0 + np.asarray(u, dtype=float) * (r_d * r_d - 1.0))


def _antenna_counts(rng: np.random.Generator, config: SystemConfig, size: int) -> np.ndarray:
    n_t = config.fixed_n_t
    if n_t is not None:
        return np.full(size, n_t, dtype=np.int64)
    return rng.choice(np.arange(1, config.n_r + 1), size=size, p=np.asarray(config.antenna_dist))


def sample_network(
    config: SystemConfig,
    window_radius: float = DEFAULT_WINDOW,
    seed: int = 0,
    min_interferers: int = 0,
) -> NetworkRealization:
    """Draw the typical link plus a PPP of interferers in a disk.

    If fewer than ``min_interferers`` points fall inside the disk, the disk
    is doubled repeatedly and the annulus filled with fresh PPP points. The
    result is still an exact PPP on the final (larger) disk, which keeps the
    ``L`` nearest interferers distributed as in the infinite network.
    """
    if not window_radius > config.r_d:
        raise ConfigError(f"window radius {window_radius} must exceed r_d = {config.r_d}")
    rng = make_rng(seed)
    if config.link_distance is not None:
        d0 = float(config.link_distance)
        rng.random()  # keep the stream layout identical
    else:
        d0 = float(link_distance_quantile(rng.random(), config.r_d))
    t0 = int(_antenna_counts(rng, config, 1)[0])

    count = rng.poisson(config.lam * math.pi * window_radius**2)
    radii = [window_radius * np.sqrt(rng.random(count))]
    outer = window_radius
    while count < min_interferers:
        inner, outer = outer, 2.0 * outer
        extra = rng.poisson(config.lam * math.pi * (outer**2 - inner**2))
        radii.append(np.sqrt(inner**2 + rng.random(extra) * (outer**2 - inner**2)))
        count += extra
    radii = np.concatenate(radii)
    n_t = _antenna_counts(rng, config, count)
    order = np.argsort(radii, kind="stable")
    return NetworkRealization(
        typical_link_distance=d0,
        typical_n_t=t0,
        interferer_distances=radii[order],
        interferer_n_t=n_t[order],
        window_radius=float(outer),
    )


def nearest_interferers(realization: NetworkRealization, count: int) -> list[tuple[float, int]]:
    """The ``count`` interferers closest to the typical receiver."""
    if count < 0:
        raise ValueError("count must be non-negative")
    if count > realization.n_interferers:
        raise InsufficientInterferers(
            f"asked for {count} nearest interferers but the window holds {realization.n_interferers}"
        )
    return realization.interferers[:count]

"""Monte Carlo estimation of ergodic spectral efficiency.

Each realization draws a fresh topology and fresh fading; the per-link
estimate is the sample mean of ``sum_m log2(1 + SINR_0(m))``. Seeds are
derived per realization index, so the output does not depend on how the
index range is split across worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy import stats

from .channel import ChannelSet, sample_channels
from .config import DETECTORS, SystemConfig
from .detection import build_filters, build_sic_filters, build_zf_filter, compute_sinr
from .geometry import DEFAULT_WINDOW, sample_network
from .rng import CHANNEL_STREAM, GEOMETRY_STREAM, complex_normal, derive_seed, make_rng


@dataclass(frozen=True)
class SpectralEfficiencyEstimate:
    detector: str
    lam: float
    per_link_mean: float
    std_error: float
    n_realizations: int
    per_stream_breakdown: tuple[float, ...] | None = None
    n_window_extensions: int = 0

    @property
    def per_area_mean(self) -> float:
        return self.lam * self.per_link_mean

    @property
    def per_area_std_error(self) -> float:
        return self.lam * self.std_error


@dataclass
class _ChunkResult:
    rates: dict[str, np.ndarray]
    streams: dict[str, np.ndarray]
    extensions: int = 0


@dataclass(frozen=True)
class FadingLawSummary:
    detector: str
    stream: int
    dof: int
    mean: float
    variance: float
    n_samples: int
    ks_statistic: float | None
    ks_pvalue: float | None
    samples: np.ndarray = field(repr=False)

    @property
    def ks_defined(self) -> bool:
        return self.ks_statistic is not None

    @property
    def expected_mean(self) -> float:
        return self.dof / 2.0


def _check_detectors(detectors: Iterable[str]) -> tuple[str, ...]:
    detectors = tuple(detectors)
    for det in detectors:
        if det not in DETECTORS:
            raise ValueError(f"unknown detector {det!r}; expected one of {DETECTORS}")
    return detectors


def _simulate_chunk(
    config: SystemConfig,
    detectors: tuple[str, ...],
    start: int,
    stop: int,
    master_seed: int,
    window_radius: float,
) -> _ChunkResult:
    n = stop - start
    width = config.n_r
    rates = {d: np.empty(n) for d in detectors}
    streams = {d: np.full((n, width), np.nan) for d in detectors}
    cancelled = config.l_cancel
    min_interferers = cancelled + (1 if config.interference_limited else 0)
    extensions = 0
    for j, index in enumerate(range(start, stop)):
        realization = sample_network(
            config,
            window_radius,
            derive_seed(master_seed, index, GEOMETRY_STREAM),
            min_interferers=min_interferers,
        )
        if realization.window_radius > window_radius:
            extensions += 1
        channels = sample_channels(realization, config.n_r, derive_seed(master_seed, index, CHANNEL_STREAM))
        for det in detectors:
            bank = build_filters(channels, det, cancelled)
            per_stream = np.log2(1.0 + compute_sinr(bank, channels, realization, config).per_stream_sinr)
            rates[det][j] = per_stream.sum()
            streams[det][j, : per_stream.size] = per_stream
    return _ChunkResult(rates=rates, streams=streams, extensions=extensions)


def _run_chunk(args) -> _ChunkResult:
    return _simulate_chunk(*args)


def _summarise(
    config: SystemConfig, det: str, rates: np.ndarray, streams: np.ndarray, extensions: int
) -> SpectralEfficiencyEstimate:
    n = rates.size
    mean = float(np.mean(rates))
    se = float(np.std(rates, ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    breakdown = None
    if config.fixed_n_t is not None:
        breakdown = tuple(float(x) for x in np.mean(streams[:, : config.fixed_n_t], axis=0))
    return SpectralEfficiencyEstimate(
        detector=det,
        lam=config.lam,
        per_link_mean=mean,
        std_error=se,
        n_realizations=n,
        per_stream_breakdown=breakdown,
        n_window_extensions=extensions,
    )


def link_rate_samples(
    config: SystemConfig,
    detectors: Iterable[str] = DETECTORS,
    n_realizations: int = 1000,
    master_seed: int = 0,
    window_radius: float = DEFAULT_WINDOW,
    workers: int = 1,
    chunk_size: int | None = None,
    progress: Callable[[dict[str, SpectralEfficiencyEstimate]], None] | None = None,
) -> _ChunkResult:
    """Per-realization link rates for every requested detector.

    All detectors are evaluated on the same topologies and fading draws.
    ``progress`` receives partial estimates each time a chunk completes.
    """
    detectors = _check_detectors(detectors)
    if n_realizations < 1:
        raise ValueError("n_realizations must be >= 1")
    if chunk_size is None:
        chunk_size = max(1, math.ceil(n_realizations / max(1, workers)))
        if progress is not None:
            chunk_size = min(chunk_size, 1000)
    bounds = [(s, min(s + chunk_size, n_realizations)) for s in range(0, n_realizations, chunk_size)]
    jobs = [(config, detectors, s, e, int(master_seed), float(window_radius)) for s, e in bounds]

    done: list[_ChunkResult] = []

    def collect(results):
        for res in results:
            done.append(res)
            if progress is not None:
                merged = _merge(done, detectors)
                progress({d: _summarise(config, d, merged.rates[d], merged.streams[d], merged.extensions) for d in detectors})

    if workers <= 1 or len(jobs) == 1:
        collect(map(_run_chunk, jobs))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            collect(pool.map(_run_chunk, jobs))
    return _merge(done, detectors)


def _merge(chunks: list[_ChunkResult], detectors: tuple[str, ...]) -> _ChunkResult:
    return _ChunkResult(
        rates={d: np.concatenate([c.rates[d] for c in chunks]) for d in detectors},
        streams={d: np.concatenate([c.streams[d] for c in chunks]) for d in detectors},
        extensions=sum(c.extensions for c in chunks),
    )


def estimate_many(
    config: SystemConfig,
    detectors: Iterable[str] = DETECTORS,
    n_realizations: int = 1000,
    master_seed: int = 0,
    window_radius: float = DEFAULT_WINDOW,
    workers: int = 1,
    progress=None,
) -> dict[str, SpectralEfficiencyEstimate]:
    detectors = _check_detectors(detectors)
    res = link_rate_samples(config, detectors, n_realizations, master_seed, window_radius, workers, progress=progress)
    return {d: _summarise(config, d, res.rates[d], res.streams[d], res.extensions) for d in detectors}


def estimate(
    config: SystemConfig,
    detector: str,
    n_realizations: int,
    master_seed: int,
    window_radius: float = DEFAULT_WINDOW,
    workers: int = 1,
    progress=None,
) -> SpectralEfficiencyEstimate:
    """Monte Carlo estimate of per-link and per-area spectral efficiency."""
    return estimate_many(config, (detector,), n_realizations, master_seed, window_radius, workers, progress)[detector]


def fading_dof(config: SystemConfig, detector: str, stream: int) -> int:
    """Chi-squared degrees of freedom of the filter-output signal fading."""
    n_t = config.fixed_n_t
    if n_t is None:
        raise ValueError("fading laws are stated for a fixed transmit antenna count")
    if detector == "zf":
        return 2 * (config.n_r - n_t - config.l_cancel * n_t + 1)
    if detector == "zf_sic":
        return 2 * (config.n_r - n_t + stream)
    raise ValueError(f"unknown detector {detector!r}")


def estimate_fading_law(
    config: SystemConfig,
    detector: str,
    stream: int,
    n_samples: int,
    seed: int = 0,
) -> FadingLawSummary:
    """Empirical law of ``|v(m)^* H_00(:, m)|^2`` against its stated chi-squared law.

    The ``config.l_cancel`` nearest interferers are nulled under ZF (their
    channels enter the filter design) and ignored under ZF-SIC.
    """
    n_t = config.fixed_n_t
    dof = fading_dof(config, detector, stream)
    n_r = config.n_r
    cancelled = config.l_cancel if detector == "zf" else 0
    samples = np.empty(n_samples)
    for i in range(n_samples):
        rng = make_rng(derive_seed(seed, i))
        block = complex_normal(rng, (n_r, n_t * (1 + cancelled)))
        channels = ChannelSet(
            direct=block[:, :n_t],
            stacked=block[:, n_t:],
            offsets=np.arange(cancelled, dtype=np.int64) * n_t,
        )
        if detector == "zf":
            v = build_zf_filter(channels, stream, cancelled)
        else:
            v = build_sic_filters(channels).filters[:, stream - 1]
        samples[i] = abs(np.vdot(v, channels.direct[:, stream - 1])) ** 2
    ks_stat = ks_p = None
    if n_samples > 1:
        ks = stats.kstest(samples, "gamma", args=(dof / 2.0,))
        ks_stat, ks_p = float(ks.statistic), float(ks.pvalue)
    return FadingLawSummary(
        detector=detector,
        stream=stream,
        dof=dof,
        mean=float(samples.mean()),
        variance=float(samples.var(ddof=1)) if n_samples > 1 else 0.0,
        n_samples=n_samples,
        ks_statistic=ks_stat,
        ks_pvalue=ks_p,
        samples=samples,
    )

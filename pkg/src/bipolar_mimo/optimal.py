"""Density and stream-count choices that maximise the high-SIR lower bounds.

``form="printed"`` evaluates the published closed forms, which divide by
``2^{ln 2 - 1}`` (direct CSIR, together with a factor 1/2 that cancels the
``2`` inside the bound) or ``2^{ln 2}`` (local CSIR). ``form="exact"``
returns the true maximiser of the high-SIR approximation ``lambda log2(A
lambda^{-alpha/2})``, which divides ``A^{2/alpha}`` by ``e``; for local CSIR
it is built on the corrected lower bound of :mod:`bounds`.
"""

from __future__ import annotations

import math

from .bounds import distance_moment
from .config import DETECTORS, SystemConfig
from .errors import HypothesisViolation, InvalidCancellation
from .special_math import gamma

FORMS = ("printed", "exact")


def _geometric_mean_log(n_r: int, n_t: int) -> float:
    """``(1/n_t) sum_m ln(n_r - n_t + m - 1)``; ``-inf`` when a factor is zero."""
    terms = [n_r - n_t + m - 1 for m in range(1, n_t + 1)]
    if min(terms) <= 0:
        return -math.inf
    return math.fsum(math.log(t) for t in terms) / n_t


def _dcsir(config: SystemConfig, n_t: int, detector: str, form: str) -> float:
    alpha = config.alpha
    delta = 2.0 / alpha
    ratio = gamma(n_t) / (gamma(n_t + delta) * gamma(1.0 - delta))
    area = math.pi * (config.r_d**2 + 1.0)
    if detector == "zf":
        log_dofs = math.log(config.n_r - n_t) if config.n_r > n_t else -math.inf
    else:
        log_dofs = _geometric_mean_log(config.n_r, n_t)
    dofs = math.exp(delta * log_dofs) if log_dofs > -math.inf else 0.0
    if form == "printed":
        return ratio / 2.0 ** (math.log(2.0) - 1.0) * dofs / area
    return 2.0 * ratio / math.e * dofs / area


def _lcsir(config: SystemConfig, n_t: int, detector: str, l_cancel: int, form: str) -> float:
    alpha = config.alpha
    half = alpha / 2.0
    if not l_cancel > half:
        raise InvalidCancellation(f"optimal density needs L > alpha/2 = {half}, got L = {l_cancel}")
    slack = (l_cancel - half) ** (half - 1.0)
    if detector == "zf":
        dof = config.n_r - (l_cancel + 1) * n_t
        log_dofs = math.log(dof) if dof > 0 else -math.inf
    else:
        log_dofs = _geometric_mean_log(config.n_r, n_t)
    if form == "printed":
        den = distance_moment(config, -alpha) * (2.0 * math.pi) ** half * n_t
        scale = 2.0 ** math.log(2.0)
    else:
        den = distance_moment(config, alpha) * 2.0 / (alpha - 2.0) * math.pi**half * n_t
        scale = math.e
    if log_dofs == -math.inf:
        return 0.0
    return (slack / den) ** (2.0 / alpha) * math.exp(2.0 / alpha * log_dofs) / scale


def optimal_density(
    config: SystemConfig,
    detector: str,
    csir_mode: str | None = None,
    form: str = "printed",
    l_cancel: int | None = None,
) -> tuple[float, float]:
    """``(lambda_star, aloha_probability)`` with ``p = min(1, lambda_star / lambda)``."""
    if detector not in DETECTORS:
        raise ValueError(f"unknown detector {detector!r}")
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}, got {form!r}")
    n_t = config.fixed_n_t
    if n_t is None:
        raise HypothesisViolation("optimal density needs a single transmit antenna count")
    mode = csir_mode or config.csir_mode
    if mode == "direct":
        lam_star = _dcsir(config, n_t, detector, form)
    elif mode == "local":
        l_cancel = config.l_cancel if l_cancel is None else l_cancel
        if not 1 <= l_cancel <= config.n_r // n_t - 1:
            raise InvalidCancellation(f"L = {l_cancel} outside 1 .. floor(n_r/n_t) - 1")
        lam_star = _lcsir(config, n_t, detector, l_cancel, form)
    else:
        raise ValueError(f"unknown csir mode {mode!r}")
    return lam_star, min(1.0, lam_star / config.lam)


def stream_constant(config: SystemConfig, use_mean_square: bool = False) -> float:
    """``b = (2/Gamma(1-2/alpha))^{alpha/2} / (lambda pi R^2)^{alpha/2}``.

    ``R^2`` is ``r_d^2`` by default; ``use_mean_square`` replaces it with
    ``r_d^2 + 1`` (twice the mean squared link distance), matching the
    constant that appears inside the lower bounds.
    """
    half = config.alpha / 2.0
    r2 = config.r_d**2 + (1.0 if use_mean_square else 0.0)
    return (2.0 / gamma(1.0 - 2.0 / config.alpha)) ** half / (config.lam * math.pi * r2) ** half


def optimal_stream_count(config: SystemConfig, use_mean_square: bool = False) -> float:
    """High-SIR stream count ``b n_r / e`` (identical for ZF and ZF-SIC); continuous, not clamped."""
    return stream_constant(config, use_mean_square) * config.n_r / math.e

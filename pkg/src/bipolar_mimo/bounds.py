"""Closed-form lower and upper bounds on the per-area spectral efficiency.

The scalar functions work in log space and accept real-valued, possibly
astronomically large antenna counts, so the scaling module can evaluate them
along ``N_t = c1 lambda^b1``, ``N_r = c2 lambda^b2`` trajectories. Stream
sums with more than ``DIRECT_SUM_LIMIT`` terms switch to an Euler-Maclaurin
tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DETECTORS, SystemConfig
from .errors import HypothesisViolation, InvalidCancellation
from .quadrature import interval_rule
from .special_math import log_gamma, log_gamma_ratio

LN2 = math.log(2.0)
DEFAULT_EPSILON = 0.4
DIRECT_SUM_LIMIT = 100_000
_EM_HEAD = 1000


@dataclass(frozen=True)
class BoundPair:
    lower: float
    upper: float
    epsilon: float
    degenerate: bool = False


def ring_moment(r_d: float, k: float) -> float:
    """``E[d^k]`` for the ring-uniform link distance on ``[1, r_d]``."""
    if k == -2.0:
        return 2.0 * math.log(r_d) / (r_d**2 - 1.0)
    return 2.0 * (r_d ** (k + 2.0) - 1.0) / ((k + 2.0) * (r_d**2 - 1.0))


def distance_moment(config: SystemConfig, k: float) -> float:
    if config.link_distance is not None:
        return float(config.link_distance) ** k
    return ring_moment(config.r_d, k)


def _log1p_exp(x: float) -> float:
    return float(np.logaddexp(0.0, x))


def stream_log_sum(log_c: float, shift: float, count: float) -> float:
    """``sum_{m=1}^{count} ln(1 + e^{log_c} (shift + m))`` for ``shift > -1``.

    Exact for ``count <= DIRECT_SUM_LIMIT`` (``count`` is rounded); beyond
    that the first ``1000`` terms are summed and the rest is replaced by the
    midpoint Euler-Maclaurin formula with its first derivative correction.
    """
    if not shift > -1.0:
        raise ValueError(f"shift must exceed -1, got {shift!r}")
    if count <= DIRECT_SUM_LIMIT:
        m = np.arange(1, int(round(count)) + 1, dtype=float)
        return float(np.sum(np.logaddexp(0.0, log_c + np.log(shift + m))))
    m = np.arange(1, _EM_HEAD + 1, dtype=float)
    head = float(np.sum(np.logaddexp(0.0, log_c + np.log(shift + m))))
    # integrate over v = log((shift + m) / lo); the width is formed with
    # log1p so it survives shift >> count
    lo = shift + _EM_HEAD + 0.5
    width = math.log1p((count - _EM_HEAD) / lo)
    v, w = interval_rule(0.0, width, 64)
    base = log_c + math.log(lo)
    integral = lo * float(np.dot(np.logaddexp(0.0, base + v) * np.exp(v), w))

    def deriv(log_y: float) -> float:
        # d/dm ln(1 + e^{log_c} y) at y = shift + m
        return math.exp(log_c - _log1p_exp(log_c + log_y))

    correction = (deriv(math.log(lo) + width) - deriv(math.log(lo))) / 24.0
    return head + integral - correction


def _check_detector(detector: str) -> None:
    if detector not in DETECTORS:
        raise ValueError(f"unknown detector {detector!r}; expected one of {DETECTORS}")


def _check_counts(n_t: float, n_r: float) -> None:
    if not (n_t >= 1.0 and n_r >= n_t):
        raise HypothesisViolation(f"need 1 <= n_t <= n_r, got n_t = {n_t}, n_r = {n_r}")


def dcsir_lower_value(
    lam: float,
    n_t: float,
    n_r: float,
    alpha: float,
    mean_d2: float,
    detector: str,
    epsilon: float = DEFAULT_EPSILON,
) -> float:
    """Lower bound via Jensen on ``d^2`` and ``e^{E ln H} > dof - 1 + epsilon``."""
    _check_detector(detector)
    _check_counts(n_t, n_r)
    half, delta = alpha / 2.0, 2.0 / alpha
    log_g = half * (LN2 - log_gamma_ratio(n_t, delta) - log_gamma(1.0 - delta))
    base = log_g - half * math.log(lam * math.pi * 2.0 * mean_d2)
    if detector == "zf":
        return 2.0 * lam * n_t / alpha * _log1p_exp(base + math.log(n_r - n_t + epsilon)) / LN2
    return 2.0 * lam / alpha * stream_log_sum(base, n_r - n_t - 1.0 + epsilon, n_t) / LN2


def dcsir_upper_value(
    lam: float,
    n_t: float,
    n_r: float,
    alpha: float,
    mean_inv_d_alpha: float,
    detector: str,
    verbatim: bool = False,
) -> float:
    """Upper bound ``lambda sum_m log2(1 + E[d^-a] E[H] E[1/I])``.

    ``E[1/I] = Gamma(1 + alpha/2) / (lambda pi K)^{alpha/2}``; ``verbatim``
    swaps in ``Gamma(1 + 2/alpha)``.
    """
    _check_detector(detector)
    _check_counts(n_t, n_r)
    half, delta = alpha / 2.0, 2.0 / alpha
    g_top = log_gamma(1.0 + delta) if verbatim else log_gamma(1.0 + half)
    log_a = (
        math.log(mean_inv_d_alpha)
        + g_top
        - half * (log_gamma_ratio(n_t, delta) + math.log(lam * math.pi) + log_gamma(1.0 - delta))
    )
    if detector == "zf":
        return lam * n_t * _log1p_exp(log_a + math.log(n_r - n_t + 1.0)) / LN2
    return lam * stream_log_sum(log_a, n_r - n_t, n_t) / LN2


def lcsir_lower_value(
    lam: float,
    n_t: float,
    n_r: float,
    alpha: float,
    l_cancel: float,
    mean_d_alpha: float,
    detector: str,
    epsilon: float = DEFAULT_EPSILON,
    verbatim: bool = False,
    mean_inv_d_alpha: float | None = None,
) -> float:
    """Lower bound with the ``L`` nearest interferers cancelled (no noise).

    Uses ``E[d^alpha]`` and ``E[I~] = 2/(alpha-2) (lambda pi)^{alpha/2} n_t
    Gamma(L+1-alpha/2)/Gamma(L)``. With ``verbatim`` the denominator is
    ``E[d^-alpha] (2 pi lambda)^{alpha/2} n_t`` instead, which needs
    ``mean_inv_d_alpha``.
    """
    _check_detector(detector)
    _check_counts(n_t, n_r)
    half = alpha / 2.0
    if not l_cancel > half:
        raise InvalidCancellation(f"bound needs L > alpha/2 = {half}, got L = {l_cancel}")
    if verbatim:
        if mean_inv_d_alpha is None:
            raise ValueError("verbatim form needs mean_inv_d_alpha")
        log_den = math.log(mean_inv_d_alpha) + half * math.log(2.0 * math.pi * lam) + math.log(n_t)
    else:
        log_den = (
            math.log(mean_d_alpha) + math.log(2.0 / (alpha - 2.0)) + half * math.log(math.pi * lam) + math.log(n_t)
        )
    log_c = (half - 1.0) * math.log(l_cancel - half) - log_den
    if detector == "zf":
        residual = n_r - (l_cancel + 1.0) * n_t
        if residual < 0.0:
            raise InvalidCancellation(f"L = {l_cancel} leaves no receive dimensions")
        return lam * n_t * _log1p_exp(log_c + math.log(residual + epsilon)) / LN2
    return lam * stream_log_sum(log_c, n_r - n_t - 1.0 + epsilon, n_t) / LN2


def _require_sir_point_mass(config: SystemConfig) -> int:
    n_t = config.fixed_n_t
    if n_t is None:
        raise HypothesisViolation("bounds need every transmitter to carry the same antenna count")
    if not config.interference_limited:
        raise HypothesisViolation("bounds hold in the interference-limited regime only")
    return n_t


def bounds_dcsir(
    config: SystemConfig,
    detector: str,
    epsilon: float = DEFAULT_EPSILON,
    verbatim_theorem: bool = False,
) -> BoundPair:
    """Lower/upper bound pair on the direct-CSIR per-area spectral efficiency."""
    n_t = _require_sir_point_mass(config)
    alpha = config.alpha
    lower = dcsir_lower_value(config.lam, n_t, config.n_r, alpha, distance_moment(config, 2.0), detector, epsilon)
    upper = dcsir_upper_value(
        config.lam, n_t, config.n_r, alpha, distance_moment(config, -alpha), detector, verbatim_theorem
    )
    degenerate = alpha - 2.0 < 0.05 or not math.isfinite(upper)
    return BoundPair(lower=lower, upper=upper, epsilon=epsilon, degenerate=degenerate)


def lower_bound_lcsir(
    config: SystemConfig,
    detector: str,
    l_cancel: int | None = None,
    epsilon: float = DEFAULT_EPSILON,
    verbatim_theorem: bool = False,
) -> float:
    """Lower bound on the local-CSIR per-area spectral efficiency; needs ``L > alpha/2``."""
    n_t = _require_sir_point_mass(config)
    l_cancel = config.l_cancel if l_cancel is None else l_cancel
    l_max = config.n_r // n_t - 1
    if int(l_cancel) != l_cancel or not 1 <= l_cancel <= l_max:
        raise InvalidCancellation(f"need 1 <= L <= floor(n_r/n_t) - 1 = {l_max}, got L = {l_cancel}")
    return lcsir_lower_value(
        config.lam,
        n_t,
        config.n_r,
        config.alpha,
        l_cancel,
        distance_moment(config, config.alpha),
        detector,
        epsilon,
        verbatim_theorem,
        distance_moment(config, -config.alpha),
    )

"""Asymptotic-order classification and log-log slope fitting.

Antenna counts grow with the density as ``N_t = c1 lambda^beta1`` and
``N_r = c2 lambda^beta2``. ``classify`` reports the exponent of the per-link
spectral efficiency; the per-area exponent is one larger. Fitted slopes are
taken on the closed-form bounds, which stay cheap and accurate at densities
far beyond the reach of the quadrature engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .bounds import DEFAULT_EPSILON, dcsir_lower_value, dcsir_upper_value, lcsir_lower_value, ring_moment
from .config import CSIR_MODES, DETECTORS
from .errors import DomainError, HypothesisViolation


@dataclass(frozen=True)
class ScalingRegime:
    beta1: float
    beta2: float
    alpha: float
    detector: str
    csir: str
    per_link_exponent: float
    log_factor: bool
    bound_type: str
    inner_exponent: float

    @property
    def per_area_exponent(self) -> float:
        return self.per_link_exponent + 1.0

    def describe(self) -> str:
        op = "Theta" if self.bound_type == "theta" else "Omega"
        log = " log(lambda)" if self.log_factor else ""
        return f"{op}(lambda^{self.per_link_exponent:g}{log}) per link"


def inner_exponent(beta1: float, beta2: float, alpha: float, detector: str, csir: str) -> float:
    """Exponent of ``lambda`` inside ``log2(1 + lambda^e)`` in the governing bound."""
    if csir == "direct":
        return beta2 - beta1 - alpha / 2.0
    e = (beta2 - beta1 - 1.0) * alpha / 2.0
    return e - beta2 if detector == "zf" else e


def classify(beta1: float, beta2: float, alpha: float, detector: str, csir: str) -> ScalingRegime:
    if detector not in DETECTORS:
        raise ValueError(f"unknown detector {detector!r}")
    if csir not in CSIR_MODES:
        raise ValueError(f"unknown csir mode {csir!r}")
    if not alpha > 2.0:
        raise HypothesisViolation(f"scaling laws need alpha > 2, got {alpha}")
    if not beta1 <= beta2:
        raise HypothesisViolation(f"scaling laws need beta1 <= beta2, got {beta1} > {beta2}")
    if beta1 < 0.0:
        raise HypothesisViolation(f"N_t must not vanish: beta1 >= 0 required, got {beta1}")
    e = inner_exponent(beta1, beta2, alpha, detector, csir)
    return ScalingRegime(
        beta1=beta1,
        beta2=beta2,
        alpha=alpha,
        detector=detector,
        csir=csir,
        per_link_exponent=beta1 + min(e, 0.0),
        log_factor=e > 0.0,
        bound_type="theta" if csir == "direct" else "omega",
        inner_exponent=e,
    )


def fit_exponent(curve: Iterable[Sequence[float]]) -> float:
    """Least-squares slope of ``log(value)`` against ``log(lambda)``."""
    pts = np.asarray(list(curve), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 4 or pts.shape[1] != 2:
        raise DomainError("need at least 4 (lambda, value) pairs")
    if np.any(pts <= 0.0) or not np.all(np.isfinite(pts)):
        raise DomainError("every lambda and value must be positive and finite")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    x = x - x.mean()
    return float(np.dot(x, y - y.mean()) / np.dot(x, x))


@dataclass(frozen=True)
class Trajectory:
    """Antenna growth law plus the fixed physical constants of a bound curve."""

    beta1: float
    beta2: float
    alpha: float
    c1: float = 1.0
    c2: float = 8.0
    r_d: float = 50.0
    epsilon: float = DEFAULT_EPSILON

    def antennas(self, lam: float) -> tuple[float, float]:
        return self.c1 * lam**self.beta1, self.c2 * lam**self.beta2


def bound_value(traj: Trajectory, lam: float, detector: str, csir: str, side: str = "lower") -> float:
    """Closed-form bound along ``traj`` at density ``lam`` (per area).

    For local CSIR the cancellation depth is ``L = floor(N_r/N_t) - 1``. Under
    ZF the leftover ``N_r - (L+1) N_t`` dimensions are dropped (``N_r`` is
    rounded down to a multiple of ``N_t``), which keeps the bound valid and
    smooth in ``lambda``.
    """
    n_t, n_r = traj.antennas(lam)
    alpha = traj.alpha
    if csir == "direct":
        if side == "lower":
            return dcsir_lower_value(lam, n_t, n_r, alpha, (traj.r_d**2 + 1.0) / 2.0, detector, traj.epsilon)
        if side == "upper":
            return dcsir_upper_value(lam, n_t, n_r, alpha, ring_moment(traj.r_d, -alpha), detector)
        raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")
    if side != "lower":
        raise ValueError("only a lower bound exists under local CSIR")
    l_cancel = math.floor(n_r / n_t) - 1
    if detector == "zf":
        n_r = (l_cancel + 1) * n_t
    return lcsir_lower_value(lam, n_t, n_r, alpha, l_cancel, ring_moment(traj.r_d, alpha), detector, traj.epsilon)


def bound_curve(
    traj: Trajectory, lambdas: Iterable[float], detector: str, csir: str, side: str = "lower"
) -> list[tuple[float, float]]:
    return [(float(lam), bound_value(traj, float(lam), detector, csir, side)) for lam in lambdas]


def fitted_slope(
    traj: Trajectory,
    detector: str,
    csir: str,
    log10_range: tuple[float, float] = (20.0, 40.0),
    points_per_decade: int = 4,
    side: str = "lower",
) -> float:
    """Per-area slope fitted over the top two decades of ``log10_range``."""
    lo, hi = log10_range
    top = max(lo, hi - 2.0)
    n = max(4, int(round((hi - top) * points_per_decade)) + 1)
    lambdas = np.logspace(top, hi, n)
    return fit_exponent(bound_curve(traj, lambdas, detector, csir, side))

"""Numerical evaluation of the closed-form spectral-efficiency expressions.

Every semi-infinite integral is taken in logarithmic coordinates
(``w = log u``), which turns the ``1/u`` endpoint weight into a constant
and the exponential tail into a double-exponential one. The integration
window is cut where the integrand drops below ~1e-18 of its scale and is
covered by a composite Gauss-Legendre rule that is refined by doubling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special as sc

from .config import DETECTORS, SystemConfig
from .errors import DomainError, HypothesisViolation, InvalidCancellation, UnsupportedLaw
from .quadrature import QuadratureResult, interval_rule, refine
from .special_math import auxiliary_g, gamma, log_gamma_ratio

LN2 = math.log(2.0)
TAIL = 60.0                     # e^{-60} ~ 1e-26: negligible tail mass
SMALL_LOG = math.log(1e-18)     # relative size of the neglected head

__all__ = [
    "QuadratureResult",
    "laplace_interference_dcsir",
    "sum_se_zf_dcsir",
    "sum_se_sic_dcsir",
    "sum_se_dcsir",
    "sum_se_fixed_distance",
    "sum_se_closed_form_alpha4",
    "lcsir_tail_integral",
    "laplace_interference_lcsir",
    "sum_se_lcsir",
    "Exponential",
    "GammaLaw",
    "PointMass",
    "Zero",
    "chi_squared",
    "hamdi_expectation",
]


def _check_detector(detector: str) -> None:
    if detector not in DETECTORS:
        raise ValueError(f"unknown detector {detector!r}; expected one of {DETECTORS}")


def stream_dofs(n_r: int, n_t: int, detector: str, l_cancel: int = 0) -> list[int]:
    """Half degrees of freedom of the signal fading for streams ``1 .. n_t``."""
    _check_detector(detector)
    if detector == "zf":
        return [n_r - (l_cancel + 1) * n_t + 1] * n_t
    return [n_r - n_t + m for m in range(1, n_t + 1)]


def _bracket_sum(log1p_z: np.ndarray, dofs: list[int]) -> np.ndarray:
    """``sum_n (1 - (1 + z)^{-n})`` evaluated from ``log1p(z)``."""
    out = np.zeros_like(log1p_z)
    for n in sorted(set(dofs)):
        out += dofs.count(n) * -np.expm1(-n * log1p_z)
    return out


def _log1p_exp(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(0.0, x)


def _distance_rule(config: SystemConfig, panels: int, kernel_scale: float = 1.0):
    """Nodes in ``d`` and weights of the link-distance law.

    The ring-uniform law is uniform in ``q = d^2`` on ``[1, r_d^2]``. The
    rates behave like ``log q``, so the rule is laid out in ``log q``.
    ``kernel_scale`` multiplies every weight.
    """
    if config.link_distance is not None:
        return np.array([float(config.link_distance)]), np.array([kernel_scale])
    lq, w = interval_rule(0.0, 2.0 * math.log(config.r_d), panels)
    q = np.exp(lq)
    return np.sqrt(q), w * q * kernel_scale / (config.r_d**2 - 1.0)


# --------------------------------------------------------------------------
# Direct CSIR


def laplace_interference_dcsir(s: float, config: SystemConfig) -> float:
    """``E[exp(-s I)]`` for the aggregate interference with unit-distance normalisation."""
    if not s >= 0.0:
        raise DomainError(f"s must be non-negative, got {s!r}")
    if s == 0.0:
        return 1.0
    return math.exp(-math.pi * config.lam * s ** (2.0 / config.alpha) * config.interference_kernel)


def _dcsir_link_rate(config: SystemConfig, detector: str, panels: int, verbatim: bool) -> float:
    alpha = config.alpha
    half = alpha / 2.0
    kernel = config.interference_kernel
    d, wd = _distance_rule(config, max(2, panels // 2))
    log_c = np.log(math.pi * config.lam * kernel) + 2.0 * np.log(d)
    total = 0.0
    for v, pv in config.support:
        a = d**alpha * v * config.noise_to_power
        if verbatim:
            a = a * d**alpha
        w_lo = np.minimum(log_c, 0.0) + SMALL_LOG / half
        w_hi = np.full_like(log_c, math.log(TAIL))
        noisy = a > 0.0
        w_hi[noisy] = np.minimum(w_hi[noisy], log_c[noisy] + np.log(TAIL / a[noisy]) / half)
        w_hi = np.maximum(w_hi, w_lo + 1.0)
        w, ww = interval_rule(w_lo, w_hi, panels)
        log_z = half * (w - log_c[:, None])
        z = np.exp(np.minimum(log_z, 700.0))
        damp = np.exp(-np.exp(w) - a[:, None] * z)
        bracket = _bracket_sum(_log1p_exp(log_z), stream_dofs(config.n_r, v, detector))
        per_distance = np.sum(damp * bracket * ww, axis=1) * half / LN2
        total += pv * float(np.dot(per_distance, wd))
    return total


def _run(evaluate, panels: int | None, start: int, rel_tol: float) -> QuadratureResult:
    if panels is None:
        return refine(evaluate, start, rel_tol=rel_tol)
    coarse, _ = evaluate(panels)
    fine, counts = evaluate(2 * panels)
    return QuadratureResult(float(fine), float(abs(fine - coarse)), counts)


def sum_se_dcsir(
    config: SystemConfig,
    detector: str,
    verbatim_theorem: bool = False,
    rel_tol: float = 1e-9,
    panels: int | None = None,
) -> QuadratureResult:
    """Per-area spectral efficiency under direct CSIR (bits/s/Hz/m^2).

    Supports a general antenna-count distribution. With
    ``verbatim_theorem=True`` the noise exponent carries ``r^alpha`` outside
    the ``(.)^{-alpha/2}`` power, the form displayed in the theorem
    statements, instead of the one produced by the derivation.

    ``panels`` fixes the rule instead of refining: the value is taken with
    ``2 * panels`` and the error estimate is the change from ``panels``.
    """
    _check_detector(detector)
    if config.csir_mode != "direct":
        raise HypothesisViolation("direct-CSIR formulas need csir_mode='direct'")

    def evaluate(p: int):
        d_nodes = 1 if config.link_distance is not None else 16 * max(2, p // 2)
        return config.lam * _dcsir_link_rate(config, detector, p, verbatim_theorem), (d_nodes, 16 * p)

    return _run(evaluate, panels, 4, rel_tol)


def sum_se_zf_dcsir(config: SystemConfig, **kwargs) -> QuadratureResult:
    return sum_se_dcsir(config, "zf", **kwargs)


def sum_se_sic_dcsir(config: SystemConfig, **kwargs) -> QuadratureResult:
    return sum_se_dcsir(config, "zf_sic", **kwargs)


def _require_fixed_sir(config: SystemConfig) -> int:
    n_t = config.fixed_n_t
    if n_t is None:
        raise HypothesisViolation("formula needs every transmitter to carry the same antenna count")
    if not config.interference_limited:
        raise HypothesisViolation("formula holds in the interference-limited regime only")
    return n_t


def sum_se_fixed_distance(
    config: SystemConfig,
    d: float,
    detector: str,
    rel_tol: float = 1e-10,
    panels: int | None = None,
) -> QuadratureResult:
    """Binomial-sum single-integral form for a common link distance ``d`` (no noise)."""
    _check_detector(detector)
    n_t = _require_fixed_sir(config)
    if not d >= 1.0:
        raise DomainError(f"link distance must be >= 1, got {d!r}")
    half = config.alpha / 2.0
    log_c = math.log(config.lam * math.pi * d * d) + math.log(config.interference_kernel)
    dofs = stream_dofs(config.n_r, n_t, detector)

    def evaluate(p: int):
        w, ww = interval_rule(min(log_c, 0.0) + SMALL_LOG / half, math.log(TAIL), p)
        log_y = half * (w - log_c)
        log1p_y = _log1p_exp(log_y)
        total = 0.0
        for m_exp in dofs:
            for n in range(1, m_exp + 1):
                log_term = math.log(math.comb(m_exp, n)) + n * log_y - m_exp * log1p_y - np.exp(w)
                total += float(np.dot(np.exp(log_term), ww))
        return config.lam * half * total / LN2, (16 * p,)

    return _run(evaluate, panels, 8, rel_tol)


def sum_se_closed_form_alpha4(config: SystemConfig, d: float) -> float:
    """Sine/cosine-integral closed form for ``alpha = 4``, ``n_t = n_r`` and a common distance ``d``."""
    n_t = config.fixed_n_t
    if config.alpha != 4.0:
        raise DomainError(f"closed form needs alpha = 4, got {config.alpha}")
    if n_t is None or n_t != config.n_r:
        raise DomainError("closed form needs n_t = n_r for every transmitter")
    if not config.interference_limited:
        raise DomainError("closed form needs the interference-limited regime")
    if not d >= 1.0:
        raise DomainError(f"link distance must be >= 1, got {d!r}")
    b = math.pi * config.lam * d * d * math.exp(log_gamma_ratio(n_t, 0.5)) * math.sqrt(math.pi)
    return 2.0 * config.lam * n_t / LN2 * auxiliary_g(b)


# --------------------------------------------------------------------------
# Local CSIR


def lcsir_tail_integral(t, n_t: int, alpha: float) -> np.ndarray:
    """``F(t) = int_t^inf 1 - (1 + v^{-alpha/2})^{-n_t} dv`` for ``t >= 0``.

    Integration by parts reduces it to a regularised incomplete beta
    function: ``F(t) = -t g(X) + n_t B(1-delta, n_t+delta) I_W(1-delta, n_t+delta)``
    with ``delta = 2/alpha``, ``X = t^{-alpha/2}``, ``W = X/(1+X)`` and
    ``g(X) = 1 - (1+X)^{-n_t}``.
    """
    t = np.asarray(t, dtype=float)
    delta = 2.0 / alpha
    p, q = 1.0 - delta, n_t + delta
    full = n_t * math.exp(sc.betaln(p, q))
    with np.errstate(divide="ignore"):
        log_x = -(alpha / 2.0) * np.log(t)
    log1p_x = _log1p_exp(log_x)
    g = -np.expm1(-n_t * log1p_x)
    w = sc.expit(log_x)
    head = np.where(t > 0.0, t * g, 0.0)
    return full * sc.betainc(p, q, w) - head


def _gamma_rule(shape: int, panels: int):
    """Rule for ``E[f(rho)]`` with ``rho ~ Gamma(shape, 1)``, laid out in ``log rho``."""
    lg = math.lgamma(shape)
    lo = (SMALL_LOG + math.lgamma(shape + 1)) / shape
    hi = math.log(shape + 45.0 + 10.0 * math.sqrt(shape))
    x, w = interval_rule(lo, hi, panels)
    rho = np.exp(x)
    return rho, w * np.exp(shape * x - rho - lg)


def _lcsir_laplace(s: np.ndarray, l_cancel: int, config: SystemConfig, n_t: int, panels: int) -> np.ndarray:
    rho, wr = _gamma_rule(l_cancel, panels)
    kappa = math.pi * config.lam * np.asarray(s, dtype=float) ** (2.0 / config.alpha)
    out = np.empty(kappa.shape)
    flat_k = kappa.ravel()
    flat_o = out.ravel()
    block = 256
    for i in range(0, flat_k.size, block):
        k = flat_k[i:i + block, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(k > 0.0, rho[None, :] / k, np.inf)
            expo = np.where(k > 0.0, k * lcsir_tail_integral(t, n_t, config.alpha), 0.0)
        flat_o[i:i + block] = np.exp(-expo) @ wr
    return out


def _check_lcsir(config: SystemConfig, l_cancel: int) -> int:
    n_t = config.fixed_n_t
    if n_t is None:
        raise HypothesisViolation("local-CSIR formulas need a single transmit antenna count")
    l_max = config.n_r // n_t - 1
    if int(l_cancel) != l_cancel or not 1 <= l_cancel <= l_max:
        raise InvalidCancellation(f"need 1 <= L <= floor(n_r/n_t) - 1 = {l_max}, got L = {l_cancel}")
    return n_t


def laplace_interference_lcsir(
    s: float,
    l_cancel: int,
    config: SystemConfig,
    rel_tol: float = 1e-10,
    panels: int | None = None,
) -> QuadratureResult:
    """``E[exp(-s I~)]`` for the interference beyond the ``L`` nearest interferers.

    The distance ``r`` to the ``L``-th nearest interferer enters through
    ``rho = lambda pi r^2 ~ Gamma(L, 1)``; conditioned on it, the probability
    generating functional reduces to ``exp(-kappa F(rho / kappa))`` with
    ``kappa = pi lambda s^{2/alpha}``.
    """
    n_t = config.fixed_n_t
    if n_t is None:
        raise HypothesisViolation("local-CSIR formulas need a single transmit antenna count")
    if int(l_cancel) != l_cancel or l_cancel < 1:
        raise InvalidCancellation(f"L must be a positive integer, got {l_cancel!r}")
    if not s >= 0.0:
        raise DomainError(f"s must be non-negative, got {s!r}")
    if s == 0.0:
        return QuadratureResult(1.0, 0.0, (0,))

    def evaluate(p: int):
        return float(_lcsir_laplace(np.array([s]), int(l_cancel), config, n_t, p)[0]), (16 * p,)

    return _run(evaluate, panels, 4, rel_tol)


def _lcsir_link_rate(config, l_cancel, n_t, detector, panels, verbatim):
    alpha = config.alpha
    delta = 2.0 / alpha
    dofs = stream_dofs(config.n_r, n_t, detector, l_cancel)
    scale = (config.r_d**2 - 1.0) / config.r_d**2 if verbatim else 1.0
    x, wx = _distance_rule(config, max(2, panels // 2), scale)
    a = n_t * config.noise_to_power

    # s beyond which the transform is below e^{-60}: kappa F(1) > 60 and Gamma(L) tail past kappa
    f1 = float(lcsir_tail_integral(1.0, n_t, alpha))
    kappa_max = (TAIL + 4.0 * l_cancel) / min(1.0, f1)
    log_s_hi = (math.log(kappa_max) - math.log(math.pi * config.lam)) / delta
    if a > 0.0:
        log_s_hi = min(log_s_hi, math.log(TAIL / a))
    log_s_lo = SMALL_LOG - math.log(max(dofs)) + alpha * math.log(float(x.min()))
    log_s_hi = max(log_s_hi, log_s_lo + 1.0)
    ls, ws = interval_rule(log_s_lo, log_s_hi, 2 * panels)
    s = np.exp(ls)
    transform = _lcsir_laplace(s, l_cancel, config, n_t, panels) * np.exp(-a * s)
    log_sx = ls[None, :] - alpha * np.log(x)[:, None]
    bracket = _bracket_sum(_log1p_exp(log_sx), dofs)
    per_distance = (bracket * (transform * ws)[None, :]).sum(axis=1) / LN2
    return float(np.dot(per_distance, wx))


def sum_se_lcsir(
    config: SystemConfig,
    l_cancel: int | None = None,
    detector: str = "zf",
    verbatim_theorem: bool = False,
    rel_tol: float = 1e-8,
    panels: int | None = None,
) -> QuadratureResult:
    """Per-area spectral efficiency when the ``L`` nearest interferers are known.

    ``l_cancel`` defaults to ``config.l_cancel``. The receiver-distance
    kernel is the ring-uniform density ``2x/(r_d^2 - 1)``;
    ``verbatim_theorem=True`` uses ``2x/r_d^2`` instead.
    """
    _check_detector(detector)
    l_cancel = config.l_cancel if l_cancel is None else l_cancel
    n_t = _check_lcsir(config, l_cancel)

    def evaluate(p: int):
        rate = _lcsir_link_rate(config, int(l_cancel), n_t, detector, p, verbatim_theorem)
        d_nodes = 1 if config.link_distance is not None else 16 * max(2, p // 2)
        return config.lam * rate, (d_nodes, 32 * p, 16 * p)

    return _run(evaluate, panels, 4, rel_tol)


# --------------------------------------------------------------------------
# E[ln(1 + X / (Y + a))] through Laplace transforms


@dataclass(frozen=True)
class GammaLaw:
    shape: float
    scale: float = 1.0

    def __post_init__(self):
        if not (self.shape > 0.0 and self.scale > 0.0):
            raise DomainError("Gamma law needs positive shape and scale")

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    def log_laplace(self, z):
        return -self.shape * np.log1p(self.scale * np.asarray(z))

    def laplace(self, z):
        return np.exp(self.log_laplace(z))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.gamma(self.shape, self.scale, size)


@dataclass(frozen=True)
class Exponential:
    mean: float = 1.0

    def __post_init__(self):
        if not self.mean > 0.0:
            raise DomainError("exponential law needs a positive mean")

    def log_laplace(self, z):
        return -np.log1p(self.mean * np.asarray(z))

    def laplace(self, z):
        return 1.0 / (1.0 + self.mean * np.asarray(z))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.exponential(self.mean, size)


@dataclass(frozen=True)
class PointMass:
    value: float

    def __post_init__(self):
        if not self.value >= 0.0:
            raise DomainError("point mass must sit at a non-negative value")

    @property
    def mean(self) -> float:
        return self.value

    def log_laplace(self, z):
        return -self.value * np.asarray(z, dtype=float)

    def laplace(self, z):
        return np.exp(self.log_laplace(z))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, self.value)


@dataclass(frozen=True)
class Zero:
    mean: float = 0.0

    def log_laplace(self, z):
        return np.zeros_like(np.asarray(z, dtype=float))

    def laplace(self, z):
        return np.ones_like(np.asarray(z, dtype=float))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.zeros(size)


Law = Union[GammaLaw, Exponential, PointMass, Zero]
_LAWS = (GammaLaw, Exponential, PointMass, Zero)


def chi_squared(dof: int) -> GammaLaw:
    """Chi-squared law with ``dof`` degrees of freedom, normalised as Gamma(dof/2, 1)."""
    return GammaLaw(dof / 2.0, 1.0)


def hamdi_expectation(x_law: Law, y_law: Law, a: float, rel_tol: float = 1e-10) -> float:
    """``E[ln(1 + X/(Y + a))] = int_0^inf e^{-az}/z (1 - M_X(z)) M_Y(z) dz`` for independent X, Y."""
    for law in (x_law, y_law):
        if not isinstance(law, _LAWS):
            raise UnsupportedLaw(f"no Laplace transform available for {type(law).__name__}")
    if not a > 0.0:
        raise DomainError(f"a must be positive, got {a!r}")
    if isinstance(x_law, Zero) or x_law.mean == 0.0:
        return 0.0
    lo = SMALL_LOG - math.log(x_law.mean)
    hi = math.log(TAIL / a)

    def evaluate(p: int):
        w, ww = interval_rule(lo, max(hi, lo + 1.0), p)
        z = np.exp(w)
        f = -np.expm1(x_law.log_laplace(z)) * np.exp(y_law.log_laplace(z) - a * z)
        return float(np.dot(f, ww)), (16 * p,)

    return refine(evaluate, 8, rel_tol=rel_tol).value


def gamma_ratio(n: float, delta: float) -> float:
    """``Gamma(n + delta) / Gamma(n)``, stable for large ``n``."""
    if n < 10:
        return gamma(n + delta) / gamma(n)
    return math.exp(log_gamma_ratio(n, delta))

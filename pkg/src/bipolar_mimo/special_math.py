"""Real special functions: Gamma, integer digamma, sine and cosine integrals.

All functions take and return Python floats. Only positive real arguments
are supported; there is no reflection formula.
"""

from __future__ import annotations

import math

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061

# Lanczos coefficients, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

_SERIES_SWITCH = 4.0
_CF_EPS = 1e-16
_CF_MAXITER = 10_000


def _lanczos_log(x: float) -> float:
    # log Gamma(x) for x >= 0.5
    z = x - 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def _stirling_correction(x: float) -> float:
    inv = 1.0 / x
    inv2 = inv * inv
    # Bernoulli-number series B_2k / (2k (2k-1) x^(2k-1)), k = 1..6
    return inv * (
        1.0 / 12.0
        - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0 - inv2 * 691.0 / 360360.0))))
    )


def gamma(x: float) -> float:
    """Gamma function for real ``x > 0``.

    Lanczos approximation; arguments below 1/2 are lifted with
    ``Gamma(x) = Gamma(x + 1) / x``. Returns ``inf`` once the result
    overflows a double (x > ~171.6).
    """
    x = float(x)
    if not x > 0.0 or math.isnan(x):
        raise DomainError(f"gamma requires x > 0, got {x!r}")
    if x < 0.5:
        return gamma(x + 1.0) / x
    if x == round(x) and x <= 21:
        return float(math.factorial(int(x) - 1))
    lg = _lanczos_log(x)
    if lg > 709.7:
        return math.inf
    return math.exp(lg)


def log_gamma(x: float) -> float:
    """Natural log of Gamma for real ``x > 0``."""
    x = float(x)
    if not x > 0.0 or math.isnan(x):
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    if x < 0.5:
        return log_gamma(x + 1.0) - math.log(x)
    if x < 10.0:
        return _lanczos_log(x)
    return (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + _stirling_correction(x)


def log_gamma_ratio(x: float, a: float) -> float:
    """``log(Gamma(x + a) / Gamma(x))`` without cancellation for large ``x``.

    For ``x >= 10`` the Stirling difference is formed analytically, so the
    result stays accurate even when ``log_gamma(x)`` itself is ~1e40.
    """
    x = float(x)
    a = float(a)
    if not x > 0.0 or not x + a > 0.0:
        raise DomainError(f"log_gamma_ratio requires x > 0 and x + a > 0, got {x!r}, {a!r}")
    if x < 10.0 or x + a < 10.0:
        return log_gamma(x + a) - log_gamma(x)
    # (x+a-1/2) log(x+a) - (x-1/2) log x - a, rearranged
    main = (x - 0.5) * math.log1p(a / x) + a * math.log(x + a) - a
    return main + _stirling_correction(x + a) - _stirling_correction(x)


def digamma_integer(n: int) -> float:
    """Digamma at a positive integer: ``-gamma_E + H_{n-1}``."""
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"digamma_integer requires an integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise DomainError(f"digamma_integer requires n >= 1, got {n}")
    return math.fsum([-EULER_GAMMA] + [1.0 / j for j in range(1, n)])


def _si_ci_series(z: float) -> tuple[float, float]:
    z2 = z * z
    # Si
    term = z
    si = z
    k = 0
    while True:
        k += 1
        term *= -z2 / ((2 * k) * (2 * k + 1))
        contrib = term / (2 * k + 1)
        si += contrib
        if abs(contrib) <= 1e-17 * abs(si):
            break
    # Ci
    term = 1.0
    acc = 0.0
    k = 0
    while True:
        k += 1
        term *= -z2 / ((2 * k - 1) * (2 * k))
        contrib = term / (2 * k)
        acc += contrib
        if abs(contrib) < 1e-17 * max(abs(acc), 1e-300):
            break
    ci = EULER_GAMMA + math.log(z) + acc
    return si, ci


def _e1_imag_cf(z: float) -> complex:
    """``exp(i z) * E1(i z)`` by modified Lentz continued fraction."""
    tiny = 1e-300
    b = complex(1.0, z)
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _CF_MAXITER):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"continued fraction for E1(i*{z}) did not converge")


def _si_ci(z: float) -> tuple[float, float]:
    if z <= _SERIES_SWITCH:
        return _si_ci_series(z)
    h = _e1_imag_cf(z)
    cs = complex(math.cos(z), -math.sin(z)) * h
    return math.pi / 2.0 + cs.imag, -cs.real


def sine_integral(z: float) -> float:
    """``Si(z) = int_0^z sin(t)/t dt`` for ``z >= 0``."""
    z = float(z)
    if not z >= 0.0:
        raise DomainError(f"sine_integral requires z >= 0, got {z!r}")
    if z == 0.0:
        return 0.0
    return _si_ci(z)[0]


def cosine_integral(z: float) -> float:
    """``Ci(z) = -int_z^inf cos(t)/t dt`` for ``z > 0``."""
    z = float(z)
    if not z > 0.0:
        raise DomainError(f"cosine_integral requires z > 0, got {z!r}")
    return _si_ci(z)[1]


def auxiliary_g(z: float) -> float:
    """``sin(z) (pi/2 - Si(z)) - cos(z) Ci(z)``, i.e. ``int_0^inf e^{-u} u / (u^2 + z^2) du``.

    For large ``z`` the two products cancel to O(1/z^2); the continued
    fraction branch returns the real part of ``e^{iz} E1(iz)`` directly and
    avoids that cancellation.
    """
    z = float(z)
    if not z > 0.0:
        raise DomainError(f"auxiliary_g requires z > 0, got {z!r}")
    if z <= _SERIES_SWITCH:
        si, ci = _si_ci_series(z)
        return math.sin(z) * (math.pi / 2.0 - si) - math.cos(z) * ci
    return _e1_imag_cf(z).real

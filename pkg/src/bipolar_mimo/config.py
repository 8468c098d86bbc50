"""System configuration shared by the simulator and the analytic engine."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import ConfigError
from .special_math import gamma

CSIR_MODES = ("direct", "local")
DETECTORS = ("zf", "zf_sic")


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class SystemConfig:
    """Physical and network parameters of the bipolar network.

    ``antenna_dist[k-1]`` is the probability that a transmitter carries
    ``k`` antennas, ``k = 1 .. n_r``. Use :meth:`fixed` for the common case
    where every transmitter has the same antenna count.
    """

    lam: float
    alpha: float
    r_d: float
    n_r: int
    antenna_dist: tuple[float, ...]
    power_dbm: float = -20.0
    noise_dbm: float = -104.0
    csir_mode: str = "direct"
    l_cancel: int = 0
    interference_limited: bool = False
    link_distance: float | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "antenna_dist", tuple(float(p) for p in self.antenna_dist))
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise ConfigError(f"lambda must be positive and finite, got {self.lam!r}")
        if not self.alpha > 2.0:
            raise ConfigError(f"alpha must exceed 2, got {self.alpha!r}")
        if not self.r_d > 1.0:
            raise ConfigError(f"r_d must exceed 1 m, got {self.r_d!r}")
        if int(self.n_r) != self.n_r or self.n_r < 1:
            raise ConfigError(f"n_r must be a positive integer, got {self.n_r!r}")
        object.__setattr__(self, "n_r", int(self.n_r))
        if len(self.antenna_dist) != self.n_r:
            raise ConfigError(f"antenna_dist needs {self.n_r} entries, got {len(self.antenna_dist)}")
        if any(p < 0.0 for p in self.antenna_dist):
            raise ConfigError("antenna_dist entries must be non-negative")
        if abs(math.fsum(self.antenna_dist) - 1.0) > 1e-12:
            raise ConfigError(f"antenna_dist must sum to 1, got {math.fsum(self.antenna_dist)!r}")
        if self.csir_mode not in CSIR_MODES:
            raise ConfigError(f"csir_mode must be one of {CSIR_MODES}, got {self.csir_mode!r}")
        if int(self.l_cancel) != self.l_cancel or self.l_cancel < 0:
            raise ConfigError(f"l_cancel must be a non-negative integer, got {self.l_cancel!r}")
        object.__setattr__(self, "l_cancel", int(self.l_cancel))
        if self.csir_mode == "direct" and self.l_cancel != 0:
            raise ConfigError("direct CSIR cancels no interferers; set l_cancel = 0")
        if self.csir_mode == "local":
            n_t = self.fixed_n_t
            if n_t is None:
                raise ConfigError("local CSIR requires a single transmit antenna count")
            l_max = self.n_r // n_t - 1
            if not 1 <= self.l_cancel <= l_max:
                raise ConfigError(f"local CSIR needs 1 <= L <= floor(n_r/n_t) - 1 = {l_max}, got L = {self.l_cancel}")
        if self.link_distance is not None and not 1.0 <= self.link_distance:
            raise ConfigError(f"link_distance must be >= 1 m, got {self.link_distance!r}")

    @classmethod
    def fixed(cls, lam: float, n_t: int, n_r: int, alpha: float = 4.0, r_d: float = 50.0, **kwargs) -> "SystemConfig":
        """Configuration in which every transmitter carries ``n_t`` antennas."""
        if int(n_t) != n_t or not 1 <= n_t <= n_r:
            raise ConfigError(f"n_t must be an integer in [1, n_r], got {n_t!r}")
        dist = [0.0] * int(n_r)
        dist[int(n_t) - 1] = 1.0
        return cls(lam=lam, alpha=alpha, r_d=r_d, n_r=n_r, antenna_dist=tuple(dist), **kwargs)

    def replace(self, **changes) -> "SystemConfig":
        return replace(self, **changes)

    @property
    def fixed_n_t(self) -> int | None:
        """The antenna count when the distribution is a point mass, else None."""
        support = [k + 1 for k, p in enumerate(self.antenna_dist) if p > 0.0]
        if len(support) == 1 and self.antenna_dist[support[0] - 1] == 1.0:
            return support[0]
        return None

    @property
    def support(self) -> list[tuple[int, float]]:
        return [(k + 1, p) for k, p in enumerate(self.antenna_dist) if p > 0.0]

    @property
    def power_w(self) -> float:
        return dbm_to_watts(self.power_dbm)

    @property
    def noise_w(self) -> float:
        return 0.0 if self.interference_limited else dbm_to_watts(self.noise_dbm)

    @property
    def noise_to_power(self) -> float:
        """sigma^2 / P, exactly zero in interference-limited mode."""
        return self.noise_w / self.power_w

    @property
    def interference_kernel(self) -> float:
        """``sum_k p_k Gamma(k + 2/a) Gamma(1 - 2/a) / Gamma(k)``."""
        delta = 2.0 / self.alpha
        g1 = gamma(1.0 - delta)
        return math.fsum(p * gamma(k + delta) / gamma(k) * g1 for k, p in self.support)


def config_from_mapping(data: dict, n_t: int | None = None, lam: float | None = None) -> SystemConfig:
    """Build a :class:`SystemConfig` from flat key/value data (e.g. a YAML file).

    Recognised keys mirror the dataclass fields; ``lambda`` and ``n_t`` are
    accepted as aliases for ``lam`` and a point-mass antenna distribution.
    """
    known = {
        "lambda", "lam", "alpha", "r_d", "n_r", "n_t", "antenna_dist", "power_dbm", "noise_dbm",
        "csir_mode", "l_cancel", "interference_limited", "link_distance",
    }
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kw = {k: v for k, v in data.items() if k in known - {"lambda", "lam", "n_t", "antenna_dist"}}
    lam = lam if lam is not None else data.get("lambda", data.get("lam"))
    if lam is None:
        raise ConfigError("config is missing 'lambda'")
    n_r = data.get("n_r")
    if n_r is None:
        raise ConfigError("config is missing 'n_r'")
    n_t = n_t if n_t is not None else data.get("n_t")
    try:
        lam = float(lam)
        kw = {k: v for k, v in kw.items() if k != "n_r"}
        for key in ("alpha", "r_d", "power_dbm", "noise_dbm"):
            if key in kw:
                kw[key] = float(kw[key])
        if "link_distance" in kw and kw["link_distance"] is not None:
            kw["link_distance"] = float(kw["link_distance"])
        if "interference_limited" in kw:
            kw["interference_limited"] = bool(kw["interference_limited"])
        if n_t is not None:
            if isinstance(n_t, Sequence) and not isinstance(n_t, str):
                raise ConfigError("expand n_t lists before building a single config")
            return SystemConfig.fixed(lam=lam, n_t=int(n_t), n_r=int(n_r), **kw)
        dist = data.get("antenna_dist")
        if dist is None:
            raise ConfigError("config needs either 'n_t' or 'antenna_dist'")
        kw.setdefault("alpha", 4.0)
        kw.setdefault("r_d", 50.0)
        return SystemConfig(lam=lam, n_r=int(n_r), antenna_dist=tuple(dist), **kw)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc

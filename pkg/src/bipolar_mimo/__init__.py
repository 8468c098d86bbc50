"""Spectral efficiency of Poisson bipolar MIMO networks with ZF and ZF-SIC receivers.

Two engines are provided: a Monte Carlo simulator (:mod:`montecarlo`) and
quadrature of the closed-form expressions (:mod:`analytic`), plus
closed-form bounds (:mod:`bounds`), optimal-parameter formulas
(:mod:`optimal`) and scaling-law tools (:mod:`scaling`).
"""

from .config import SystemConfig
from .errors import (
    BipolarMimoError,
    ConfigError,
    DimensionExhausted,
    DomainError,
    HypothesisViolation,
    InsufficientDof,
    InsufficientInterferers,
    InvalidCancellation,
    QuadratureNonConvergence,
    UnsupportedLaw,
)

__version__ = "0.1.0"

__all__ = [
    "SystemConfig",
    "BipolarMimoError",
    "ConfigError",
    "DimensionExhausted",
    "DomainError",
    "HypothesisViolation",
    "InsufficientDof",
    "InsufficientInterferers",
    "InvalidCancellation",
    "QuadratureNonConvergence",
    "UnsupportedLaw",
]

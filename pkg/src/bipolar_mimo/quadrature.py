"""Composite Gauss-Legendre rules with refine-by-doubling error control."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import QuadratureNonConvergence

DEFAULT_ORDER = 16


@dataclass(frozen=True)
class QuadratureResult:
    """Integral value with the change observed on the last refinement."""

    value: float
    error_estimate: float
    node_counts: tuple[int, ...]

    def __float__(self) -> float:
        return self.value


@lru_cache(maxsize=32)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


def unit_rule(panels: int, order: int = DEFAULT_ORDER) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite rule on ``[0, 1]`` with equal panels."""
    x, w = _legendre(order)
    edges = np.arange(panels)[:, None] / panels
    nodes = (edges + x[None, :] / panels).ravel()
    weights = np.tile(w / panels, panels)
    return nodes, weights


def interval_rule(a, b, panels: int, order: int = DEFAULT_ORDER) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule on ``[a, b]``; ``a`` and ``b`` may be arrays (one interval per entry).

    The returned arrays have shape ``broadcast(a, b).shape + (n_nodes,)``.
    """
    t, w = unit_rule(panels, order)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    return a + (b - a) * t, (b - a) * w


def refine(
    evaluate: Callable[[int], tuple[float, tuple[int, ...]]],
    start: int,
    rel_tol: float = 1e-9,
    abs_tol: float = 0.0,
    max_doublings: int = 6,
) -> QuadratureResult:
    """Double the panel count until two successive values agree.

    ``evaluate(panels)`` returns ``(value, node_counts)``. Raises
    :class:`QuadratureNonConvergence` when ``max_doublings`` refinements do
    not reach ``max(rel_tol * |value|, abs_tol)``.
    """
    panels = start
    prev, _ = evaluate(panels)
    err = float("inf")
    for _ in range(max_doublings):
        panels *= 2
        value, counts = evaluate(panels)
        err = abs(value - prev)
        if not np.isfinite(value):
            break
        if err <= max(rel_tol * abs(value), abs_tol):
            return QuadratureResult(float(value), float(err), counts)
        prev = value
    raise QuadratureNonConvergence(
        f"quadrature did not settle after {max_doublings} doublings (last change {err:.3g})"
    )

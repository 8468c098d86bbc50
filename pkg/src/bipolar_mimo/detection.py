"""Zero-forcing and ZF-SIC receive filters and the per-stream SINR.

Streams are numbered ``m = 1 .. N_t`` in decoding order, matching the
chi-squared degrees-of-freedom formulas used by the analytic engine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .channel import ChannelSet
from .config import SystemConfig
from .errors import DimensionExhausted, InsufficientDof
from .geometry import NetworkRealization

RANK_TOL = 1e-10


@dataclass(frozen=True)
class FilterBank:
    """Unit-norm receive filters, one column per stream."""

    filters: np.ndarray
    detector: str
    cancelled: tuple[int, ...]

    @property
    def n_streams(self) -> int:
        return self.filters.shape[1]


@dataclass(frozen=True)
class SinrBreakdown:
    """Per-stream SINR and the terms it is assembled from.

    All power terms are already scaled by the path loss and normalised by
    the per-stream transmit power, so
    ``sinr = signal / (residual_inter_stream + cancelled_interference
    + far_interference + noise_term)``.
    """

    per_stream_sinr: np.ndarray
    signal_power: np.ndarray
    residual_inter_stream: np.ndarray
    cancelled_interference: np.ndarray
    far_interference: np.ndarray
    noise_term: float


def null_space_basis(vectors, n_r: int | None = None, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``vectors``.

    ``vectors`` is either an ``n_r x k`` array (columns are the vectors) or a
    sequence of length-``n_r`` vectors. Uses a column-pivoted Householder QR;
    a diagonal entry of R below ``tol`` times the largest one counts as rank
    deficiency.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        a = vectors
    else:
        vectors = list(vectors)
        if not vectors:
            if n_r is None:
                raise ValueError("n_r is required when no vectors are given")
            return np.eye(n_r, dtype=complex)
        a = np.column_stack(vectors)
    dim, k = a.shape
    if n_r is not None and n_r != dim:
        raise ValueError(f"vectors have dimension {dim}, expected {n_r}")
    if k == 0:
        return np.eye(dim, dtype=complex)
    if k >= dim:
        raise DimensionExhausted(f"{k} vectors leave no null space in dimension {dim}")
    q, r, _ = scipy.linalg.qr(a, mode="full", pivoting=True)
    diag = np.abs(np.diag(r))
    rank = int(np.count_nonzero(diag > tol * diag[0])) if diag[0] > 0 else 0
    return q[:, rank:]


def _project(basis: np.ndarray, h: np.ndarray) -> np.ndarray:
    p = basis @ (basis.conj().T @ h)
    return p / np.linalg.norm(p)


def _cancelled_columns(channels: ChannelSet, cancelled: int) -> np.ndarray:
    if cancelled == 0:
        return channels.stacked[:, :0]
    if cancelled > len(channels.offsets):
        raise InsufficientDof(f"cannot cancel {cancelled} interferers, only {len(channels.offsets)} present")
    stop = channels.offsets[cancelled] if cancelled < len(channels.offsets) else channels.stacked.shape[1]
    return channels.stacked[:, :stop]


def build_zf_filter(channels: ChannelSet, stream: int, cancelled: int = 0) -> np.ndarray:
    """ZF filter for stream ``stream`` that also nulls the ``cancelled`` nearest interferers.

    The filter is the normalised projection of the stream's own column onto
    the null space of the other own columns and every column of the
    cancelled interferer matrices.
    """
    h = channels.direct
    n_r, n_t = h.shape
    if not 1 <= stream <= n_t:
        raise ValueError(f"stream must be in 1..{n_t}, got {stream}")
    nulled = _cancelled_columns(channels, cancelled)
    dof = n_r - (n_t - 1) - nulled.shape[1]
    if dof < 1:
        raise InsufficientDof(f"ZF needs n_r - (n_t - 1) - sum(n_t of cancelled) >= 1, got {dof}")
    others = np.delete(h, stream - 1, axis=1)
    basis = null_space_basis(np.hstack([others, nulled]), n_r)
    return _project(basis, h[:, stream - 1])


def build_zf_filters(channels: ChannelSet, cancelled: int = 0) -> FilterBank:
    n_t = channels.direct.shape[1]
    filters = np.column_stack([build_zf_filter(channels, m, cancelled) for m in range(1, n_t + 1)])
    return FilterBank(filters=filters, detector="zf", cancelled=tuple(range(cancelled)))


def build_sic_filters(channels: ChannelSet, cancelled: int = 0) -> FilterBank:
    """ZF-SIC filters in decoding order.

    Stream ``m`` is projected away from own columns ``m+1 .. N_t`` only;
    earlier streams and the ``cancelled`` nearest interferers are assumed
    already decoded and subtracted.
    """
    h = channels.direct
    n_r, n_t = h.shape
    if n_r < n_t:
        raise InsufficientDof(f"ZF-SIC needs n_r >= n_t, got n_r = {n_r}, n_t = {n_t}")
    if cancelled > len(channels.offsets):
        raise InsufficientDof(f"cannot cancel {cancelled} interferers, only {len(channels.offsets)} present")
    cols = []
    for m in range(1, n_t + 1):
        basis = null_space_basis(h[:, m:], n_r)
        cols.append(_project(basis, h[:, m - 1]))
    return FilterBank(filters=np.column_stack(cols), detector="zf_sic", cancelled=tuple(range(cancelled)))


def build_filters(channels: ChannelSet, detector: str, cancelled: int = 0) -> FilterBank:
    if detector == "zf":
        return build_zf_filters(channels, cancelled)
    if detector == "zf_sic":
        return build_sic_filters(channels, cancelled)
    raise ValueError(f"unknown detector {detector!r}")


def interferer_projected_power(filters: FilterBank, channels: ChannelSet) -> np.ndarray:
    """``||v(m)^* H_{0,l}||^2`` for every stream ``m`` (rows) and interferer ``l`` (columns)."""
    if channels.stacked.shape[1] == 0:
        return np.zeros((filters.n_streams, 0))
    proj = np.abs(filters.filters.conj().T @ channels.stacked) ** 2
    return np.add.reduceat(proj, channels.offsets, axis=1)


def compute_sinr(
    filters: FilterBank,
    channels: ChannelSet,
    realization: NetworkRealization,
    config: SystemConfig,
) -> SinrBreakdown:
    """Per-stream SINR with the interference split into its three parts.

    Under ZF every term is evaluated on the filter output, so the nulled
    parts show up as round-off-sized residuals. Under ZF-SIC, previously
    decoded streams and the cancelled interferers are removed exactly.
    """
    alpha = config.alpha
    v = filters.filters
    n_t = v.shape[1]
    path = realization.typical_link_distance ** (-alpha)
    own = np.abs(v.conj().T @ channels.direct) ** 2 * path
    signal = np.diag(own).copy()
    if filters.detector == "zf_sic":
        # streams before m are already subtracted
        residual = np.triu(own, k=1).sum(axis=1)
    else:
        residual = own.sum(axis=1) - signal
    loss = realization.interferer_distances ** (-alpha)
    per_interferer = interferer_projected_power(filters, channels) * loss
    n_cancel = len(filters.cancelled)
    near = per_interferer[:, :n_cancel].sum(axis=1)
    if filters.detector == "zf_sic":
        near = np.zeros(n_t)
    far = per_interferer[:, n_cancel:].sum(axis=1)
    noise = n_t * config.noise_to_power
    denom = residual + near + far + noise
    with np.errstate(divide="ignore"):
        sinr = np.where(denom > 0, signal / np.where(denom > 0, denom, 1.0), np.inf)
    return SinrBreakdown(
        per_stream_sinr=sinr,
        signal_power=signal,
        residual_inter_stream=residual,
        cancelled_interference=near,
        far_interference=far,
        noise_term=noise,
    )

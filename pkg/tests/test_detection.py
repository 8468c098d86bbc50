import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from bipolar_mimo.channel import ChannelSet
from bipolar_mimo.config import SystemConfig
from bipolar_mimo.detection import (
    build_filters,
    build_sic_filters,
    build_zf_filter,
    build_zf_filters,
    compute_sinr,
    null_space_basis,
)
from bipolar_mimo.errors import DimensionExhausted, InsufficientDof
from bipolar_mimo.geometry import NetworkRealization
from bipolar_mimo.rng import complex_normal, make_rng


def _channels(rng, n_r, n_t, interferer_n_t):
    total = int(sum(interferer_n_t))
    block = complex_normal(rng, (n_r, n_t + total))
    offsets = np.concatenate(([0], np.cumsum(interferer_n_t)[:-1])).astype(np.int64) if interferer_n_t else np.zeros(0, np.int64)
    return ChannelSet(direct=block[:, :n_t], stacked=block[:, n_t:], offsets=offsets)


def _network(d0, n_t, distances, interferer_n_t):
    return NetworkRealization(d0, n_t, np.asarray(distances, float), np.asarray(interferer_n_t, np.int64), 500.0)


def test_null_space_empty_list():
    basis = null_space_basis([], n_r=2)
    assert np.allclose(basis, np.eye(2))


def test_null_space_of_first_axis():
    basis = null_space_basis([np.array([1.0, 0.0, 0.0], complex)])
    assert basis.shape == (3, 2)
    assert np.allclose(np.abs(basis[0]), 0.0, atol=1e-15)
    assert np.allclose(basis.conj().T @ basis, np.eye(2), atol=1e-14)


def test_null_space_random_gram():
    a = complex_normal(make_rng(1), (8, 3))
    basis = null_space_basis(a)
    assert basis.shape == (8, 5)
    assert np.allclose(basis.conj().T @ basis, np.eye(5), atol=1e-12)
    assert np.max(np.abs(basis.conj().T @ a)) < 1e-10


def test_null_space_exhausted():
    with pytest.raises(DimensionExhausted):
        null_space_basis(complex_normal(make_rng(2), (3, 3)))


def test_null_space_rank_deficient_input():
    a = complex_normal(make_rng(3), (5, 1))
    basis = null_space_basis(np.hstack([a, 2.0 * a]))
    assert basis.shape == (5, 4)


def test_matched_filter_single_antenna():
    ch = _channels(make_rng(4), 1, 1, [])
    v = build_zf_filter(ch, 1)
    h = ch.direct[:, 0]
    assert np.allclose(v, h / np.linalg.norm(h))


def test_zf_orthogonality_many_instances():
    rng = make_rng(5)
    worst = 0.0
    for _ in range(1000):
        ch = _channels(rng, 8, 2, [2, 2, 2])
        bank = build_zf_filters(ch, cancelled=2)
        assert np.allclose(np.linalg.norm(bank.filters, axis=0), 1.0, atol=1e-12)
        for m in range(2):
            nulled = np.hstack([np.delete(ch.direct, m, axis=1), ch.stacked[:, :4]])
            worst = max(worst, np.max(np.abs(bank.filters[:, m].conj() @ nulled)))
    assert worst <= 1e-10


def test_zf_dof_violation():
    ch = _channels(make_rng(6), 4, 2, [2, 2])
    with pytest.raises(InsufficientDof):
        build_zf_filter(ch, 1, cancelled=2)


def test_sic_needs_enough_receive_antennas():
    ch = _channels(make_rng(6), 2, 3, [])
    with pytest.raises(InsufficientDof):
        build_sic_filters(ch)


def test_sic_single_stream_equals_zf():
    ch = _channels(make_rng(7), 3, 1, [1])
    assert np.allclose(build_sic_filters(ch).filters[:, 0], build_zf_filter(ch, 1))


@pytest.mark.parametrize(
    "n_r,n_t,cancel,interferer_nt,mean",
    [(4, 2, 0, [], 3.0), (8, 2, 3, [2, 2, 2], 1.0), (3, 1, 1, [1], 2.0)],
)
def test_zf_fading_law(n_r, n_t, cancel, interferer_nt, mean):
    rng = make_rng(8)
    samples = []
    for _ in range(10_000):
        ch = _channels(rng, n_r, n_t, interferer_nt)
        v = build_zf_filter(ch, 1, cancel)
        samples.append(abs(np.vdot(v, ch.direct[:, 0])) ** 2)
    samples = np.array(samples)
    assert samples.mean() == pytest.approx(mean, rel=0.03)
    assert stats.kstest(samples, "gamma", args=(mean,)).pvalue > 0.01


@pytest.mark.parametrize("n_r,n_t,m", [(4, 2, 2), (4, 2, 1), (5, 3, 2)])
def test_sic_fading_law(n_r, n_t, m):
    rng = make_rng(9)
    samples = []
    for _ in range(10_000):
        ch = _channels(rng, n_r, n_t, [])
        v = build_sic_filters(ch).filters[:, m - 1]
        samples.append(abs(np.vdot(v, ch.direct[:, m - 1])) ** 2)
    shape = n_r - n_t + m
    assert np.mean(samples) == pytest.approx(shape, rel=0.03)
    assert stats.kstest(samples, "gamma", args=(shape,)).pvalue > 0.01


def test_cross_link_fading_law():
    # projected power of a whole N_t,l-column interferer matrix is Gamma(N_t,l)
    rng = make_rng(10)
    samples = []
    for _ in range(10_000):
        ch = _channels(rng, 4, 2, [3])
        v = build_zf_filter(ch, 1)
        samples.append(np.sum(np.abs(v.conj() @ ch.interferer(0)) ** 2))
    assert stats.kstest(samples, "gamma", args=(3,)).pvalue > 0.01


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**63 - 1), st.integers(1, 4), st.integers(0, 3))
def test_sic_signal_dominates_zf_pathwise(seed, n_t, extra):
    n_r = n_t + extra
    ch = _channels(make_rng(seed), n_r, n_t, [])
    zf = build_zf_filters(ch).filters
    sic = build_sic_filters(ch).filters
    for m in range(n_t):
        h = ch.direct[:, m]
        assert abs(np.vdot(sic[:, m], h)) ** 2 >= abs(np.vdot(zf[:, m], h)) ** 2 * (1 - 1e-12)


def test_noise_only_sinr():
    config = SystemConfig.fixed(1e-5, 2, 4)
    net = _network(20.0, 2, [], [])
    ch = _channels(make_rng(11), 4, 2, [])
    out = compute_sinr(build_zf_filters(ch), ch, net, config)
    h = np.array([abs(np.vdot(build_zf_filter(ch, m), ch.direct[:, m - 1])) ** 2 for m in (1, 2)])
    expected = h * 20.0**-4 / (2 * config.noise_to_power)
    assert np.allclose(out.per_stream_sinr, expected, rtol=1e-12)


def test_no_interference_no_noise_is_infinite():
    config = SystemConfig.fixed(1e-5, 1, 2, interference_limited=True)
    ch = _channels(make_rng(12), 2, 1, [])
    out = compute_sinr(build_zf_filters(ch), ch, _network(5.0, 1, [], []), config)
    assert np.isinf(out.per_stream_sinr).all()


def test_single_interferer_scalar():
    # N_r = N_t = 1: SINR = |h0|^2 d^-a / (|h1|^2 (2d)^-a)
    config = SystemConfig.fixed(1e-5, 1, 1, interference_limited=True)
    d = 7.0
    ch = _channels(make_rng(13), 1, 1, [1])
    out = compute_sinr(build_zf_filters(ch), ch, _network(d, 1, [2 * d], [1]), config)
    g0, g1 = abs(ch.direct[0, 0]) ** 2, abs(ch.stacked[0, 0]) ** 2
    assert out.per_stream_sinr[0] == pytest.approx(g0 * d**-4 / (g1 * (2 * d) ** -4), rel=1e-12)


def test_sinr_composition_and_zf_residuals():
    config = SystemConfig.fixed(1e-4, 2, 8, csir_mode="local", l_cancel=2)
    ch = _channels(make_rng(14), 8, 2, [2, 2, 2, 2])
    net = _network(12.0, 2, [15.0, 30.0, 40.0, 80.0], [2, 2, 2, 2])
    for det in ("zf", "zf_sic"):
        out = compute_sinr(build_filters(ch, det, 2), ch, net, config)
        denom = out.residual_inter_stream + out.cancelled_interference + out.far_interference + out.noise_term
        assert np.allclose(out.per_stream_sinr, out.signal_power / denom, rtol=1e-14)
        if det == "zf":
            assert np.all(out.residual_inter_stream <= 1e-9)
            assert np.all(out.cancelled_interference <= 1e-9)
        else:
            assert np.all(out.cancelled_interference == 0.0)


def test_zf_sinr_invariant_to_cancelled_interferer():
    config = SystemConfig.fixed(1e-4, 2, 6, csir_mode="local", l_cancel=1, interference_limited=True)
    rng = make_rng(15)
    ch = _channels(rng, 6, 2, [2, 2, 2])
    net = _network(10.0, 2, [20.0, 30.0, 50.0], [2, 2, 2])
    base = compute_sinr(build_zf_filters(ch, 1), ch, net, config).per_stream_sinr
    # redraw the cancelled matrix inside its own column span, a thousand times
    # stronger, and pull the interferer much closer
    mix = complex_normal(rng, (2, 2)) * 1e3
    stacked = ch.stacked.copy()
    stacked[:, :2] = stacked[:, :2] @ mix
    ch2 = ChannelSet(direct=ch.direct, stacked=stacked, offsets=ch.offsets)
    net2 = _network(10.0, 2, [1.5, 30.0, 50.0], [2, 2, 2])
    moved = compute_sinr(build_zf_filters(ch2, 1), ch2, net2, config).per_stream_sinr
    assert np.allclose(moved, base, rtol=1e-9, atol=0.0)


def test_build_filters_rejects_unknown():
    ch = _channels(make_rng(16), 2, 1, [])
    with pytest.raises(ValueError):
        build_filters(ch, "mmse")

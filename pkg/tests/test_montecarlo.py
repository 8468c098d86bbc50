import math

import numpy as np
import pytest
from scipy import integrate, stats

from bipolar_mimo.channel import ChannelSet, sample_channels
from bipolar_mimo.config import SystemConfig
from bipolar_mimo.detection import build_filters, compute_sinr
from bipolar_mimo.geometry import NetworkRealization, sample_network
from bipolar_mimo.montecarlo import (
    estimate,
    estimate_fading_law,
    estimate_many,
    fading_dof,
    link_rate_samples,
)
from bipolar_mimo.rng import derive_seed


def test_worker_count_does_not_change_result():
    config = SystemConfig.fixed(1e-4, 2, 4)
    one = estimate_many(config, n_realizations=120, master_seed=5, workers=1)
    four = estimate_many(config, n_realizations=120, master_seed=5, workers=4)
    for det in one:
        assert one[det].per_link_mean == four[det].per_link_mean
        assert one[det].std_error == four[det].std_error


def test_chunking_does_not_change_samples():
    config = SystemConfig.fixed(1e-4, 1, 2)
    a = link_rate_samples(config, ("zf",), 50, 3, chunk_size=50)
    b = link_rate_samples(config, ("zf",), 50, 3, chunk_size=7)
    assert a.rates["zf"].tobytes() == b.rates["zf"].tobytes()


def test_estimate_fields_are_consistent():
    config = SystemConfig.fixed(3e-5, 2, 4)
    res = link_rate_samples(config, ("zf",), 200, 8)
    est = estimate(config, "zf", 200, 8)
    rates = res.rates["zf"]
    assert est.per_link_mean == pytest.approx(rates.mean(), rel=1e-15)
    assert est.std_error == pytest.approx(rates.std(ddof=1) / math.sqrt(200), rel=1e-12)
    assert est.per_area_mean == config.lam * est.per_link_mean
    assert len(est.per_stream_breakdown) == 2
    assert sum(est.per_stream_breakdown) == pytest.approx(est.per_link_mean, rel=1e-12)


def _noise_only_rate(config, n_t, shape):
    snr0 = config.power_w / (n_t * config.noise_w)
    r2 = config.r_d**2

    def inner(d):
        c = snr0 * d ** (-config.alpha)
        return integrate.quad(lambda h: np.log2(1.0 + c * h) * stats.gamma.pdf(h, shape), 0.0, np.inf, epsabs=1e-11)[0]

    return n_t * integrate.quad(lambda d: inner(d) * 2.0 * d / (r2 - 1.0), 1.0, config.r_d, epsabs=1e-10, limit=200)[0]


def test_noise_limited_rate_matches_quadrature():
    config = SystemConfig.fixed(1e-13, 2, 4)
    est = estimate(config, "zf", 4000, 21)
    expected = _noise_only_rate(config, 2, 3)
    assert abs(est.per_link_mean - expected) < 3.0 * est.std_error


def test_rate_nondecreasing_in_receive_antennas():
    means = []
    for n_r in (2, 3, 4, 6):
        est = estimate(SystemConfig.fixed(1e-4, 2, n_r), "zf", 1500, 13)
        means.append((est.per_link_mean, est.std_error))
    for (m0, s0), (m1, s1) in zip(means, means[1:]):
        assert m1 >= m0 - 2.0 * math.hypot(s0, s1)


@pytest.mark.parametrize("n_t,n_r", [(1, 2), (2, 4), (3, 4), (2, 2)])
def test_sic_at_least_zf(n_t, n_r):
    config = SystemConfig.fixed(5e-5, n_t, n_r, interference_limited=True)
    est = estimate_many(config, n_realizations=800, master_seed=17)
    zf, sic = est["zf"], est["zf_sic"]
    assert sic.per_link_mean >= zf.per_link_mean - 2.0 * math.hypot(zf.std_error, sic.std_error)


def _truncate(net: NetworkRealization, ch: ChannelSet, radius: float):
    keep = int(np.searchsorted(net.interferer_distances, radius, side="right"))
    cols = int(ch.offsets[keep]) if keep < ch.offsets.size else ch.stacked.shape[1]
    small = NetworkRealization(
        net.typical_link_distance, net.typical_n_t, net.interferer_distances[:keep], net.interferer_n_t[:keep], radius
    )
    return small, ChannelSet(ch.direct, ch.stacked[:, :cols], ch.offsets[:keep])


def test_window_doubling_changes_less_than_one_standard_error():
    # paired comparison: the 500 m estimate is the 1000 m realization with
    # the outer annulus removed
    config = SystemConfig.fixed(4e-5, 2, 4)
    full, cut = [], []
    for i in range(600):
        net = sample_network(config, 1000.0, derive_seed(31, i, 0))
        ch = sample_channels(net, 4, derive_seed(31, i, 1))
        small_net, small_ch = _truncate(net, ch, 500.0)
        for store, n, c in ((full, net, ch), (cut, small_net, small_ch)):
            sinr = compute_sinr(build_filters(c, "zf"), c, n, config).per_stream_sinr
            store.append(np.log2(1.0 + sinr).sum())
    full, cut = np.array(full), np.array(cut)
    se = full.std(ddof=1) / math.sqrt(full.size)
    assert abs(full.mean() - cut.mean()) < se


def test_window_extensions_are_counted():
    config = SystemConfig.fixed(1e-7, 1, 2, interference_limited=True)
    est = estimate(config, "zf", 20, 1, window_radius=100.0)
    assert est.n_window_extensions > 0
    assert math.isfinite(est.per_link_mean)


def test_progress_reports_partial_estimates():
    seen = []
    estimate(SystemConfig.fixed(1e-4, 1, 2), "zf", 30, 2, progress=lambda p: seen.append(p["zf"].n_realizations))
    assert seen and seen[-1] == 30


def test_rejects_bad_inputs():
    config = SystemConfig.fixed(1e-4, 1, 2)
    with pytest.raises(ValueError):
        estimate(config, "mmse", 10, 0)
    with pytest.raises(ValueError):
        estimate(config, "zf", 0, 0)


def test_fading_law_square_zf():
    config = SystemConfig.fixed(1e-4, 3, 3)
    out = estimate_fading_law(config, "zf", 1, 5000, seed=2)
    assert out.dof == 2 and out.expected_mean == 1.0
    assert out.mean == pytest.approx(1.0, rel=0.05)
    assert out.ks_pvalue > 0.01


def test_fading_law_last_sic_stream():
    config = SystemConfig.fixed(1e-4, 3, 4)
    out = estimate_fading_law(config, "zf_sic", 3, 5000, seed=3)
    assert out.dof == 8
    assert out.mean == pytest.approx(4.0, rel=0.05)
    assert out.ks_pvalue > 0.01


def test_fading_law_single_sample_flags_ks():
    out = estimate_fading_law(SystemConfig.fixed(1e-4, 1, 2), "zf", 1, 1)
    assert not out.ks_defined
    assert out.ks_pvalue is None


def test_fading_dof_formula():
    local = SystemConfig.fixed(1e-4, 2, 8, csir_mode="local", l_cancel=3)
    assert fading_dof(local, "zf", 1) == 2
    assert fading_dof(SystemConfig.fixed(1e-4, 2, 4), "zf_sic", 2) == 8

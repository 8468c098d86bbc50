"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line with the measured
quantity next to its tolerance, then asserts. Run with::

    pytest tests/test_acceptance.py -v

The Monte Carlo criteria (2, 3) take roughly two minutes on one core.
"""

import itertools
import math
import os
import time

import numpy as np
import pytest
import yaml

from bipolar_mimo import analytic as A
from bipolar_mimo import cli
from bipolar_mimo.bounds import bounds_dcsir, lower_bound_lcsir
from bipolar_mimo.config import SystemConfig
from bipolar_mimo.montecarlo import estimate_fading_law, estimate_many
from bipolar_mimo.scaling import Trajectory, classify, fitted_slope
from bipolar_mimo.special_math import gamma

WORKERS = os.cpu_count() or 1


@pytest.fixture
def verdict(capsys):
    def emit(number: int, title: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}")
        assert ok, detail

    return emit


def _sir(lam, n_t, n_r, **kw):
    return SystemConfig.fixed(lam, n_t, n_r, interference_limited=True, **kw)


def test_criterion_01_fading_laws(verdict):
    cases = [
        ("ZF (4,2,0)", SystemConfig.fixed(1e-4, 2, 4), "zf", 1, 6),
        ("SIC m=2 (4,2,0)", SystemConfig.fixed(1e-4, 2, 4), "zf_sic", 2, 8),
        ("ZF (8,2,3)", SystemConfig.fixed(1e-4, 2, 8, csir_mode="local", l_cancel=3), "zf", 1, 2),
        ("SIC m=4 (4,4,0)", SystemConfig.fixed(1e-4, 4, 4), "zf_sic", 4, 8),
    ]
    start = time.perf_counter()
    worst_p, worst_mean, ok = 1.0, 0.0, True
    for i, (_, config, det, stream, dof) in enumerate(cases):
        out = estimate_fading_law(config, det, stream, 10_000, seed=100 + i)
        mean_err = abs(out.mean - dof / 2.0) / (dof / 2.0)
        ok &= out.dof == dof and out.ks_pvalue > 0.01 and mean_err <= 0.02
        worst_p, worst_mean = min(worst_p, out.ks_pvalue), max(worst_mean, mean_err)
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60.0
    verdict(1, "chi-squared fading laws", ok,
            f"min KS p = {worst_p:.3f} (> 0.01), max mean error = {worst_mean:.4f} (<= 0.02), {elapsed:.1f} s")


def _engine_agreement(configs, label):
    worst, rows = 0.0, []
    for config in configs:
        mc = estimate_many(config, n_realizations=20_000, master_seed=2024, workers=WORKERS)
        for det in ("zf", "zf_sic"):
            if config.csir_mode == "direct":
                exact = A.sum_se_dcsir(config, det).value
            else:
                exact = A.sum_se_lcsir(config, detector=det).value
            rel = abs(mc[det].per_area_mean - exact) / exact
            worst = max(worst, rel)
            rows.append((config.lam, config.fixed_n_t, det, rel))
    return worst, rows


def test_criterion_02_engine_agreement_direct(verdict):
    configs = [SystemConfig.fixed(lam, n_t, 4) for lam in (1e-5, 4e-5) for n_t in (1, 2, 4)]
    start = time.perf_counter()
    worst, rows = _engine_agreement(configs, "direct")
    elapsed = time.perf_counter() - start
    verdict(2, "Monte Carlo vs quadrature, direct CSIR", worst <= 0.05 and elapsed / len(configs) < 300.0,
            f"max relative gap = {worst:.4f} (<= 0.05) over {len(rows)} cells, {elapsed / len(configs):.0f} s per cell")


def test_criterion_03_engine_agreement_local(verdict):
    # n_t = 4 = n_r leaves L = 0, which is not a local-CSIR configuration
    configs = [
        SystemConfig.fixed(lam, n_t, 4, csir_mode="local", l_cancel=4 // n_t - 1)
        for lam in (1e-5, 4e-5)
        for n_t in (1, 2)
    ]
    worst, rows = _engine_agreement(configs, "local")
    verdict(3, "Monte Carlo vs quadrature, local CSIR", worst <= 0.05,
            f"max relative gap = {worst:.4f} (<= 0.05) over {len(rows)} cells")


def test_criterion_04_mean_constant(verdict):
    start = time.perf_counter()
    lam = 1e-4
    values = []
    for n_t in (1, 2, 4):
        d = math.sqrt(gamma(n_t) / (2.0 * lam * gamma(n_t + 0.5) * gamma(0.5)))
        values.append(A.sum_se_closed_form_alpha4(_sir(lam, n_t, n_t), d) / (lam * n_t))
    elapsed = time.perf_counter() - start
    worst = max(abs(v - 0.5772) for v in values)
    verdict(4, "closed-form constant", worst <= 1e-3 and elapsed < 1.0,
            f"C/(lambda N_t) = {', '.join(f'{v:.5f}' for v in values)} (0.5772 +- 0.001), {elapsed * 1e3:.0f} ms")


def test_criterion_05_closed_form_consistency(verdict):
    grid = [(1e-5, 10.0, 1), (4e-5, 25.0, 2), (1e-4, 3.0, 4), (1e-3, 40.0, 3), (2e-6, 1.0, 2)]
    start = time.perf_counter()
    worst = 0.0
    for lam, d, n_t in grid:
        config = _sir(lam, n_t, n_t)
        single = A.sum_se_fixed_distance(config, d, "zf").value
        closed = A.sum_se_closed_form_alpha4(config, d)
        double = A.sum_se_dcsir(config.replace(link_distance=d), "zf").value
        for a, b in ((single, closed), (single, double), (closed, double)):
            worst = max(worst, abs(a - b) / abs(b))
    elapsed = time.perf_counter() - start
    verdict(5, "single integral, Si/Ci form and double integral agree", worst <= 1e-6 and elapsed < 10.0,
            f"max pairwise relative gap = {worst:.2e} (<= 1e-6), {elapsed:.2f} s")


def test_criterion_06_bound_sandwich(verdict):
    violations, checked = [], 0
    for lam, n_t, n_r in itertools.product((1e-5, 1e-4, 1e-3), (1, 2, 3), (3, 4, 6)):
        config = _sir(lam, n_t, n_r)
        for det in ("zf", "zf_sic"):
            pair = bounds_dcsir(config, det)
            value = A.sum_se_dcsir(config, det).value
            checked += 1
            if not pair.lower <= value <= pair.upper:
                violations.append(("direct", lam, n_t, n_r, det))
    for lam, n_t, n_r in itertools.product((1e-5, 1e-4, 1e-3), (1, 2, 3), (12, 16, 20)):
        config = _sir(lam, n_t, n_r, csir_mode="local", l_cancel=n_r // n_t - 1)
        for det in ("zf", "zf_sic"):
            checked += 1
            if not lower_bound_lcsir(config, det) <= A.sum_se_lcsir(config, detector=det).value:
                violations.append(("local", lam, n_t, n_r, det))
    verdict(6, "bound sandwich", not violations, f"{len(violations)} violations in {checked} checks")


SCALING_CASES = [
    (0.0, 0.0, 4.0, "direct"),
    (0.0, 2.0, 4.0, "direct"),
    (0.0, 3.0, 4.0, "direct"),
    (0.5, 2.5, 4.0, "direct"),
    (1.0, 2.0, 3.0, "direct"),
    (0.0, 2.0, 4.0, "local"),
    (0.0, 1.0, 4.0, "local"),
    (0.0, 0.5, 3.0, "local"),
    (1.0, 1.5, 4.0, "local"),
]


def test_criterion_07_scaling_slopes(verdict):
    worst_rel, worst_pair, ok = 0.0, 0.0, True
    for b1, b2, alpha, csir in SCALING_CASES:
        traj = Trajectory(b1, b2, alpha)
        slopes = {}
        for det in ("zf", "zf_sic"):
            target = classify(b1, b2, alpha, det, csir).per_area_exponent
            slopes[det] = fitted_slope(traj, det, csir)
            if target == 0.0:
                # a relative band around zero is empty; use the same width in absolute terms
                ok &= abs(slopes[det]) <= 0.05
            else:
                rel = abs(slopes[det] - target) / abs(target)
                worst_rel = max(worst_rel, rel)
                ok &= rel <= 0.05
        if csir == "direct":
            pair = abs(slopes["zf"] - slopes["zf_sic"]) / abs(slopes["zf"])
            worst_pair = max(worst_pair, pair)
            ok &= pair <= 0.01
    verdict(7, "scaling slopes", ok,
            f"max slope error = {worst_rel:.4f} (<= 0.05), max direct ZF/SIC gap = {worst_pair:.2e} (<= 0.01)")


def test_criterion_08_hamdi_identity(verdict):
    triples = [
        (A.Exponential(1.0), A.Zero(), 1.0),
        (A.GammaLaw(3.0), A.GammaLaw(2.0), 0.5),
        (A.chi_squared(6), A.PointMass(1.0), 2.0),
        (A.PointMass(2.0), A.Exponential(1.5), 0.1),
        (A.GammaLaw(0.5, 4.0), A.chi_squared(4), 0.01),
    ]
    rng = np.random.default_rng(8)
    worst = 0.0
    for x_law, y_law, a in triples:
        n = 1_000_000
        samples = np.log1p(x_law.sample(rng, n) / (y_law.sample(rng, n) + a))
        se = samples.std(ddof=1) / math.sqrt(n)
        worst = max(worst, abs(samples.mean() - A.hamdi_expectation(x_law, y_law, a)) / se)
    verdict(8, "expectation identity vs Monte Carlo", worst <= 3.0, f"max gap = {worst:.2f} standard errors (<= 3)")


def test_criterion_09_determinism(verdict, tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(yaml.safe_dump({"lambda": [1e-5, 4e-5], "n_t": [1, 2], "n_r": 4, "realizations": 300}))
    numeric = []
    for workers in (1, 4, 8):
        out = tmp_path / f"w{workers}.csv"
        code = cli.run(["simulate", "--config", str(cfg), "--out", str(out), "--seed", "2024", "--workers", str(workers)])
        assert code == 0
        lines = out.read_text().splitlines()
        header = lines[0].split(",")
        keep = [header.index(c) for c in ("per_link_se", "per_area_se", "std_error_or_quad_error")]
        numeric.append([tuple(line.split(",")[k] for k in keep) for line in lines[1:]])
    same = numeric[0] == numeric[1] == numeric[2]
    verdict(9, "worker-count determinism", same, f"{len(numeric[0])} rows compared at 1, 4 and 8 workers")


def test_criterion_10_shape_properties(verdict):
    problems = []
    # ZF-SIC never below ZF
    for lam, n_t, n_r in itertools.product((1e-5, 4e-5, 1e-4, 1e-3), (1, 2, 4), (4, 6)):
        config = SystemConfig.fixed(lam, n_t, n_r)
        if A.sum_se_sic_dcsir(config).value < A.sum_se_zf_dcsir(config).value:
            problems.append(("sic<zf", lam, n_t, n_r))
    for lam, n_t in itertools.product((1e-5, 4e-5, 1e-4), (1, 2)):
        config = SystemConfig.fixed(lam, n_t, 4, csir_mode="local", l_cancel=4 // n_t - 1)
        if A.sum_se_lcsir(config, detector="zf_sic").value < A.sum_se_lcsir(config, detector="zf").value:
            problems.append(("local sic<zf", lam, n_t))
    # sub-linear growth in lambda for fixed antennas
    lams = np.logspace(-6, -3, 13)
    for n_t in (1, 2, 4):
        values = np.array([A.sum_se_zf_dcsir(SystemConfig.fixed(x, n_t, 4)).value for x in lams])
        slopes = np.diff(np.log(values)) / np.diff(np.log(lams))
        if not (np.all(slopes < 1.0) and slopes[-1] < slopes[0]):
            problems.append(("not sub-linear", n_t))
    # more receive antennas, more throughput
    for lam, n_t in itertools.product((1e-5, 4e-5, 1e-4), (1, 2)):
        for det in ("zf", "zf_sic"):
            vals = [A.sum_se_dcsir(SystemConfig.fixed(lam, n_t, n_r), det).value for n_r in (2, 3, 4, 6, 8)]
            if any(b <= a for a, b in zip(vals, vals[1:])):
                problems.append(("n_r not increasing", lam, n_t, det))
    verdict(10, "qualitative shape properties", not problems,
            "SIC >= ZF, sub-linear in lambda, increasing in N_r" if not problems else f"failures: {problems}")

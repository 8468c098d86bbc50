"""Local CSIR with L = floor(N_r/N_t) - 1: Monte Carlo, quadrature and the direct-CSIR baseline.

    python scripts/compare_local.py --realizations 20000
"""

from __future__ import annotations

import argparse

from bipolar_mimo.analytic import sum_se_dcsir, sum_se_lcsir
from bipolar_mimo.config import SystemConfig
from bipolar_mimo.montecarlo import estimate_many


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--realizations", type=int, default=20_000)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--n-r", type=int, default=4)
    parser.add_argument("--lambdas", type=float, nargs="+", default=[1e-5, 4e-5, 1e-4, 1e-3])
    args = parser.parse_args()

    print(f"{'lambda':>9} {'N_t':>3} {'L':>2} {'det':>6} {'monte carlo':>13} {'quadrature':>13} {'direct':>13}")
    for lam in args.lambdas:
        for n_t in range(1, args.n_r // 2 + 1):
            l_cancel = args.n_r // n_t - 1
            base = SystemConfig.fixed(lam, n_t, args.n_r)
            config = base.replace(csir_mode="local", l_cancel=l_cancel)
            mc = estimate_many(config, n_realizations=args.realizations, master_seed=args.seed, workers=args.workers)
            for det, est in mc.items():
                local = sum_se_lcsir(config, detector=det).value
                direct = sum_se_dcsir(base, det).value
                print(f"{lam:9.1e} {n_t:3d} {l_cancel:2d} {det:>6} {est.per_area_mean:13.6e} {local:13.6e} {direct:13.6e}")


if __name__ == "__main__":
    main()

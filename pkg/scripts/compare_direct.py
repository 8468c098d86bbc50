"""Monte Carlo against quadrature for direct CSIR over a density and antenna grid.

    python scripts/compare_direct.py --realizations 20000 --workers 4
"""

from __future__ import annotations

import argparse

from bipolar_mimo.analytic import sum_se_dcsir
from bipolar_mimo.config import SystemConfig
from bipolar_mimo.montecarlo import estimate_many


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--realizations", type=int, default=20_000)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--lambdas", type=float, nargs="+", default=[1e-5, 2e-5, 4e-5, 1e-4])
    args = parser.parse_args()

    print(f"{'lambda':>9} {'N_t':>3} {'det':>6} {'monte carlo':>13} {'quadrature':>13} {'rel gap':>8}")
    for lam in args.lambdas:
        for n_t in (1, 2, 4):
            config = SystemConfig.fixed(lam, n_t, 4)
            mc = estimate_many(config, n_realizations=args.realizations, master_seed=args.seed, workers=args.workers)
            for det, est in mc.items():
                exact = sum_se_dcsir(config, det).value
                gap = (est.per_area_mean - exact) / exact
                print(f"{lam:9.1e} {n_t:3d} {det:>6} {est.per_area_mean:13.6e} {exact:13.6e} {gap:+8.4f}")


if __name__ == "__main__":
    main()

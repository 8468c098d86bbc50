"""Predicted against fitted per-area exponents along N_t = c1 lambda^b1, N_r = c2 lambda^b2."""

from __future__ import annotations

import argparse
import itertools

from bipolar_mimo.scaling import Trajectory, classify, fitted_slope

CASES = [
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


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid", action="store_true", help="sweep a 27-point (beta1, beta2 - beta1, alpha) grid")
    args = parser.parse_args()
    cases = CASES
    if args.grid:
        cases = [
            (b1, b1 + db, a, csir)
            for b1, db, a in itertools.product((0.0, 0.5, 1.0), (0.0, 1.0, 2.5), (3.0, 4.0, 5.0))
            for csir in ("direct", "local")
        ]
    print(f"{'b1':>4} {'b2':>4} {'alpha':>5} {'csir':>6} {'det':>6} {'order':>34} {'predicted':>9} {'fitted':>8}")
    for b1, b2, alpha, csir in cases:
        traj = Trajectory(b1, b2, alpha)
        for det in ("zf", "zf_sic"):
            regime = classify(b1, b2, alpha, det, csir)
            slope = fitted_slope(traj, det, csir)
            print(f"{b1:4.1f} {b2:4.1f} {alpha:5.1f} {csir:>6} {det:>6} {regime.describe():>34} "
                  f"{regime.per_area_exponent:9.3f} {slope:8.3f}")


if __name__ == "__main__":
    main()

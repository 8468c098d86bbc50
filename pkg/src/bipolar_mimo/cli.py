"""Command-line front end: ``python -m bipolar_mimo <command> --config FILE --out FILE``.

Commands
--------
simulate  Monte Carlo estimates for every grid point and detector.
analytic  Quadrature values, closed-form bounds and optimal-parameter values.
compare   Monte Carlo and quadrature side by side with a pass/fail column.
sweep     One row per value of ``sweep.parameter`` in the config file.
scaling   Regime classification plus the slope fitted on the bound curve.

The config file is YAML. System keys mirror :class:`SystemConfig`;
``lambda`` and ``n_t`` may be lists, in which case their Cartesian product
is evaluated. Output is CSV, appended to an existing file whose header
matches.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

import yaml

from . import analytic, bounds, montecarlo, optimal, scaling
from .config import DETECTORS, SystemConfig, config_from_mapping
from .errors import ConfigError, HypothesisViolation, InsufficientDof, QuadratureNonConvergence
from .geometry import DEFAULT_WINDOW

log = logging.getLogger("bipolar_mimo")

EXIT_CONFIG = 2
EXIT_HYPOTHESIS = 3
EXIT_QUADRATURE = 4

SE_COLUMNS = [
    "lambda", "n_t", "n_r", "alpha", "L", "csir", "detector", "engine",
    "per_link_se", "per_area_se", "std_error_or_quad_error", "seed",
    "quantity", "value", "relative_error", "passed",
    "r_d", "power_dbm", "noise_dbm", "interference_limited", "link_distance",
    "n_realizations", "window_radius", "verbatim_theorem", "epsilon", "command",
]
SCALING_COLUMNS = [
    "beta1", "beta2", "alpha", "c1", "c2", "detector", "csir", "bound_type",
    "per_link_exponent", "per_area_exponent", "log_factor", "fitted_slope",
    "lambda_min", "lambda_max", "command",
]
RUN_KEYS = {"detectors", "window_radius", "sweep", "scaling", "realizations", "seed"}


@dataclass
class RunManifest:
    command: str
    config_path: Path
    output_path: Path
    master_seed: int
    n_realizations: int
    workers: int = 1
    tolerance: float = 0.05
    epsilon: float = bounds.DEFAULT_EPSILON
    verbatim_theorem: bool = False
    interference_limited: bool | None = None
    window_radius: float = DEFAULT_WINDOW
    detectors: tuple[str, ...] = DETECTORS
    sweep_axis: tuple[str, list] | None = None
    raw: dict = field(default_factory=dict)


def _fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_rows(path: Path, columns: list[str], rows: Iterable[dict]) -> int:
    """Append ``rows`` to ``path``; a header is written only to an empty file."""
    rows = list(rows)
    exists = path.exists() and path.stat().st_size > 0
    if exists:
        with path.open(newline="") as fh:
            header = next(csv.reader(fh), [])
        if header != columns:
            raise ConfigError(f"{path} already holds a table with a different header")
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("a", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if not exists:
            writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c)) for c in columns])
    return len(rows)


def load_config_file(path: Path) -> dict:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a key/value mapping")
    return data


def _as_list(value) -> list:
    if isinstance(value, (list, tuple)):
        if not value:
            raise ConfigError("empty list in config")
        return list(value)
    return [value]


def expand_grid(data: dict, manifest: RunManifest) -> list[SystemConfig]:
    """Every system configuration described by the file (lists are crossed)."""
    system = {k: v for k, v in data.items() if k not in RUN_KEYS}
    if manifest.interference_limited is not None:
        system["interference_limited"] = manifest.interference_limited
    lams = _as_list(system.pop("lambda", system.pop("lam", None)))
    n_ts = _as_list(system.pop("n_t", None))
    configs = []
    for lam, n_t in itertools.product(lams, n_ts):
        if lam is None:
            raise ConfigError("config is missing 'lambda'")
        configs.append(config_from_mapping(system, n_t=n_t, lam=lam))
    return configs


def _base_row(config: SystemConfig, manifest: RunManifest) -> dict:
    return {
        "lambda": config.lam,
        "n_t": config.fixed_n_t if config.fixed_n_t is not None else "mixed",
        "n_r": config.n_r,
        "alpha": config.alpha,
        "L": config.l_cancel,
        "csir": config.csir_mode,
        "r_d": config.r_d,
        "power_dbm": config.power_dbm,
        "noise_dbm": config.noise_dbm,
        "interference_limited": config.interference_limited,
        "link_distance": config.link_distance,
        "verbatim_theorem": manifest.verbatim_theorem,
        "epsilon": manifest.epsilon,
        "command": manifest.command,
    }


def _simulate_rows(config: SystemConfig, manifest: RunManifest) -> list[dict]:
    def report(partial):
        for det, est in partial.items():
            log.info("%s lambda=%g: %d realizations, per-area %.6g", det, config.lam, est.n_realizations, est.per_area_mean)

    results = montecarlo.estimate_many(
        config,
        manifest.detectors,
        manifest.n_realizations,
        manifest.master_seed,
        manifest.window_radius,
        manifest.workers,
        progress=report if log.isEnabledFor(logging.INFO) else None,
    )
    rows = []
    for det, est in results.items():
        row = _base_row(config, manifest)
        row.update(
            detector=det,
            engine="montecarlo",
            quantity="spectral_efficiency",
            per_link_se=est.per_link_mean,
            per_area_se=est.per_area_mean,
            value=est.per_area_mean,
            std_error_or_quad_error=est.per_area_std_error,
            seed=manifest.master_seed,
            n_realizations=est.n_realizations,
            window_radius=manifest.window_radius,
        )
        rows.append(row)
    return rows


def _theorem(config: SystemConfig, det: str, manifest: RunManifest):
    if config.csir_mode == "direct":
        return analytic.sum_se_dcsir(config, det, verbatim_theorem=manifest.verbatim_theorem)
    return analytic.sum_se_lcsir(config, config.l_cancel, det, verbatim_theorem=manifest.verbatim_theorem)


def _analytic_rows(config: SystemConfig, manifest: RunManifest, extras: bool = True) -> list[dict]:
    rows = []
    for det in manifest.detectors:
        res = _theorem(config, det, manifest)
        row = _base_row(config, manifest)
        row.update(
            detector=det,
            engine="analytic",
            quantity="spectral_efficiency",
            per_link_se=res.value / config.lam,
            per_area_se=res.value,
            value=res.value,
            std_error_or_quad_error=res.error_estimate,
        )
        rows.append(row)
        if not extras or config.fixed_n_t is None:
            continue
        extra: list[tuple[str, float]] = []
        if config.interference_limited:
            if config.csir_mode == "direct":
                pair = bounds.bounds_dcsir(config, det, manifest.epsilon, manifest.verbatim_theorem)
                extra += [("bound_lower", pair.lower), ("bound_upper", pair.upper)]
            elif config.l_cancel > config.alpha / 2.0:
                lb = bounds.lower_bound_lcsir(config, det, None, manifest.epsilon, manifest.verbatim_theorem)
                extra.append(("bound_lower", lb))
        for form in optimal.FORMS:
            suffix = "" if form == "printed" else "_exact"
            try:
                lam_star, p_star = optimal.optimal_density(config, det, form=form)
            except HypothesisViolation as exc:
                log.info("no optimal density for %s: %s", det, exc)
                break
            extra += [("optimal_density" + suffix, lam_star), ("aloha_probability" + suffix, p_star)]
        for name, value in extra:
            r = _base_row(config, manifest)
            r.update(detector=det, engine="closed_form", quantity=name, value=value)
            if name.startswith("bound"):
                r.update(per_area_se=value, per_link_se=value / config.lam)
            rows.append(r)
    return rows


def _compare_rows(config: SystemConfig, manifest: RunManifest) -> list[dict]:
    mc = {r["detector"]: r for r in _simulate_rows(config, manifest)}
    an = {r["detector"]: r for r in _analytic_rows(config, manifest, extras=False)}
    rows = []
    for det in manifest.detectors:
        rel = (mc[det]["per_area_se"] - an[det]["per_area_se"]) / an[det]["per_area_se"]
        for src in (mc[det], an[det]):
            row = dict(src)
            row.update(command="compare", relative_error=rel, passed=abs(rel) <= manifest.tolerance)
            rows.append(row)
    return rows


def _sweep_configs(data: dict, manifest: RunManifest) -> list[SystemConfig]:
    spec = data.get("sweep")
    if not isinstance(spec, dict) or "parameter" not in spec:
        raise ConfigError("sweep needs a 'sweep' mapping with 'parameter' and 'values'")
    values = spec.get("values")
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep values must be a non-empty list")
    name = spec["parameter"]
    manifest.sweep_axis = (name, values)
    configs = []
    for value in values:
        point = {k: v for k, v in data.items() if k != "sweep"}
        point[name] = value
        configs.extend(expand_grid(point, manifest))
    return configs


def _scaling_rows(data: dict, manifest: RunManifest) -> list[dict]:
    cases = data.get("scaling")
    if isinstance(cases, dict):
        cases = [cases]
    if not isinstance(cases, list) or not cases:
        raise ConfigError("scaling needs a non-empty 'scaling' list of {beta1, beta2, ...} entries")
    rows = []
    for case in cases:
        try:
            b1, b2 = float(case["beta1"]), float(case["beta2"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad scaling entry {case!r}") from exc
        alpha = float(case.get("alpha", data.get("alpha", 4.0)))
        csir = case.get("csir", data.get("csir_mode", "direct"))
        lo, hi = case.get("log10_range", (20.0, 40.0))
        traj = scaling.Trajectory(
            b1, b2, alpha,
            c1=float(case.get("c1", 1.0)),
            c2=float(case.get("c2", 8.0)),
            r_d=float(data.get("r_d", 50.0)),
            epsilon=manifest.epsilon,
        )
        for det in manifest.detectors:
            regime = scaling.classify(b1, b2, alpha, det, csir)
            slope = scaling.fitted_slope(traj, det, csir, (float(lo), float(hi)))
            rows.append({
                "beta1": b1, "beta2": b2, "alpha": alpha, "c1": traj.c1, "c2": traj.c2,
                "detector": det, "csir": csir, "bound_type": regime.bound_type,
                "per_link_exponent": regime.per_link_exponent,
                "per_area_exponent": regime.per_area_exponent,
                "log_factor": regime.log_factor, "fitted_slope": slope,
                "lambda_min": 10.0 ** max(float(lo), float(hi) - 2.0), "lambda_max": 10.0 ** float(hi),
                "command": "scaling",
            })
    return rows


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bipolar_mimo", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=["simulate", "analytic", "compare", "sweep", "scaling"])
    parser.add_argument("--config", required=True, type=Path, help="YAML configuration file")
    parser.add_argument("--out", required=True, type=Path, help="CSV file to append to")
    parser.add_argument("--seed", type=int, default=None, help="master seed (default: config 'seed' or 0)")
    parser.add_argument("--realizations", type=int, default=None, help="Monte Carlo realizations per point")
    parser.add_argument("--workers", type=int, default=1, help="worker processes for Monte Carlo")
    parser.add_argument("--tolerance", type=float, default=0.05, help="relative tolerance for compare")
    parser.add_argument("--interference-limited", action="store_true", default=None,
                        help="force noise to zero regardless of the config")
    parser.add_argument("--verbatim-theorem", action="store_true",
                        help="use the uncorrected formula variants")
    parser.add_argument("--epsilon", type=float, default=bounds.DEFAULT_EPSILON, help="lower-bound slack")
    parser.add_argument("--engine", choices=["analytic", "montecarlo"], default="analytic",
                        help="engine used by sweep")
    parser.add_argument("-v", "--verbose", action="store_true", help="progress messages on stderr")
    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        data = load_config_file(args.config)
        detectors = tuple(_as_list(data.get("detectors", list(DETECTORS))))
        if any(d not in DETECTORS for d in detectors):
            raise ConfigError(f"detectors must be drawn from {DETECTORS}")
        manifest = RunManifest(
            command=args.command,
            config_path=args.config,
            output_path=args.out,
            master_seed=args.seed if args.seed is not None else int(data.get("seed", 0)),
            n_realizations=args.realizations if args.realizations is not None else int(data.get("realizations", 20_000)),
            workers=args.workers,
            tolerance=args.tolerance,
            epsilon=args.epsilon,
            verbatim_theorem=args.verbatim_theorem,
            interference_limited=args.interference_limited,
            window_radius=float(data.get("window_radius", DEFAULT_WINDOW)),
            detectors=detectors,
            raw=data,
        )
        if manifest.n_realizations < 1 or manifest.workers < 1:
            raise ConfigError("realizations and workers must be positive")
        if args.command == "scaling":
            n = write_rows(args.out, SCALING_COLUMNS, _scaling_rows(data, manifest))
            log.info("wrote %d rows to %s", n, args.out)
            return 0
        if args.command == "sweep":
            configs = _sweep_configs(data, manifest)
            produce = _simulate_rows if args.engine == "montecarlo" else _analytic_rows
        else:
            configs = expand_grid(data, manifest)
            produce = {"simulate": _simulate_rows, "analytic": _analytic_rows, "compare": _compare_rows}[args.command]
        rows = []
        for config in configs:
            rows.extend(produce(config, manifest))
        n = write_rows(args.out, SE_COLUMNS, rows)
        log.info("wrote %d rows to %s", n, args.out)
        if args.command == "compare" and not all(r["passed"] for r in rows):
            print("compare: some rows exceed the tolerance", file=sys.stderr)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (HypothesisViolation, InsufficientDof) as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except QuadratureNonConvergence as exc:
        print(f"quadrature did not converge: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE


def main() -> None:
    sys.exit(run())

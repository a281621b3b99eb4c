"""Command-line front end: single solves, the three figure sweeps, and the
oracle validation suite. Exit codes: 0 ok, 1 validation failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import harness, oracles
from .driver import run_ao

RA_TMAX_VARIANTS = (
    harness.SchemeVariant("ra_optimized", "ra_tmax60", np.pi / 3),
    harness.SchemeVariant("ra_optimized", "ra_tmax30", np.pi / 6),
    harness.SchemeVariant("ra_optimized", "ra_tmax15", np.pi / 12),
)

POWER_GRID_DBM = tuple(float(v) for v in range(0, 21))
SPREAD_GRID_RAD = (np.pi / 6, np.pi / 3, np.pi / 2, 2 * np.pi / 3, 5 * np.pi / 6, np.pi)
ANTENNA_GRID = (4.0, 8.0, 12.0, 16.0, 20.0)


def _add_common(sub):
    sub.add_argument("--config", help="JSON scenario file (defaults baked in)")
    sub.add_argument("--quiet", action="store_true")


def _load_params(args) -> dict:
    if args.config is None:
        return dict(harness.DEFAULT_SCENARIO)
    try:
        return harness.load_config_json(args.config)
    except FileNotFoundError:
        raise SystemExit(_usage_error(f"config file not found: {args.config}"))
    except harness.ConfigError as exc:
        raise SystemExit(_usage_error(str(exc)))


def _usage_error(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        grid = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise SystemExit(_usage_error(f"bad grid '{text}'"))
    if not grid:
        raise SystemExit(_usage_error("empty grid"))
    return grid


def _variants(args, defaults) -> tuple:
    if args.scheme is None:
        return defaults
    wanted = args.scheme.split(",")
    by_label = {v.csv_label: v for v in defaults}
    out = []
    for name in wanted:
        if name in by_label:
            out.append(by_label[name])
        elif name in harness.SCHEME_KINDS:
            out.append(harness.SchemeVariant(name))
        else:
            raise SystemExit(_usage_error(f"unknown scheme '{name}'"))
    return tuple(out)


def _cmd_solve(args) -> int:
    params = _load_params(args)
    config, geometry = harness.build_scenario(params)
    if args.scheme and args.scheme != "ra_optimized":
        result = harness.run_scheme(args.scheme, config, geometry, args.seed,
                                    random_draws=int(params["random_orientation_draws"]))
        if not args.quiet:
            print(f"scheme={args.scheme} min_sinr_db={result.min_sinr_db:.4f} "
                  f"iterations={result.iterations}")
        return 0
    report = run_ao(config, geometry, args.seed)
    if not args.quiet:
        print(f"min_sinr_db={report.min_sinr_db:.4f} "
              f"pre_normalization_db={10 * np.log10(max(report.min_sinr_pre_norm, 1e-300)):.4f} "
              f"iterations={report.iterations} termination={report.termination}")
    if args.out:
        rows = []
        for i, value in enumerate(report.min_sinr_history):
            rows.append((float(i), "ra_optimized", args.seed, value,
                         10 * np.log10(max(value, 1e-300)), report.iterations, 0.0))
        harness.write_rows(args.out, rows)
        if not args.quiet:
            print(f"wrote convergence history to {args.out}")
    return 0


def _run_sweep(args, axis: str, default_grid, default_variants) -> int:
    params = _load_params(args)
    if args.config is None and axis == harness.AXIS_ANTENNAS:
        # Fig-3c-style element sweep uses three groups of four users.
        params.update({"num_groups": 3, "group_sizes": [4, 4, 4]})
    grid = _parse_grid(args.grid) if args.grid else tuple(default_grid)
    seeds = tuple(range(args.seeds))
    spec = harness.ExperimentSpec(params=params, axis=axis, grid=grid, seeds=seeds,
                                  out=args.out, variants=_variants(args, default_variants))
    rows = harness.sweep(spec)
    if not args.quiet:
        print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_validate(args) -> int:
    failures = 0
    print("oracle validation")
    print("-" * 72)
    for res in oracles.oracle_suite(seed=args.seed):
        status = "pass" if res.passed else "FAIL"
        failures += not res.passed
        print(f"[{status}] grid-vs-ao {res.instance}: oracle={res.oracle_value:.6g} "
              f"ao={res.optimizer_value:.6g} gap={res.relative_gap:+.3%}")
    fd = oracles.finite_difference_suite(seed=args.seed)
    status = "pass" if fd.passed else "FAIL"
    failures += not fd.passed
    print(f"[{status}] finite-difference suite: worst gradient err "
          f"{fd.worst_gradient_error:.2e}, worst hessian err {fd.worst_hessian_error:.2e}")
    lip = oracles.lipschitz_sampling_suite(seed=args.seed)
    status = "pass" if lip.passed else "FAIL"
    failures += not lip.passed
    print(f"[{status}] curvature-bound sampling: min signal margin "
          f"{lip.min_signal_margin:+.3e}, min interference margin {lip.min_interference_margin:+.3e}")
    print("-" * 72)
    print("all suites passed" if failures == 0 else f"{failures} suite(s) failed")
    return 0 if failures == 0 else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ramcast",
        description="max-min SINR multicast optimizer with rotatable boresights")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("solve", help="solve one scenario and print the report")
    _add_common(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--scheme", default=None, choices=harness.SCHEME_KINDS)
    sp.add_argument("--out", help="optional CSV of the min-SINR iteration history")
    sp.set_defaults(func=_cmd_solve)

    for name, axis, grid, variants in (
        ("sweep-power", harness.AXIS_POWER, POWER_GRID_DBM, harness.DEFAULT_VARIANTS),
        ("sweep-angle", harness.AXIS_SPREAD, SPREAD_GRID_RAD,
         RA_TMAX_VARIANTS + tuple(harness.SchemeVariant(k) for k in
                                  ("fixed_directional", "random_orientation", "isotropic"))),
        ("sweep-antennas", harness.AXIS_ANTENNAS, ANTENNA_GRID, harness.DEFAULT_VARIANTS),
    ):
        sp = subs.add_parser(name, help=f"sweep over {axis}")
        _add_common(sp)
        sp.add_argument("--out", required=True)
        sp.add_argument("--seeds", type=int, default=1, help="number of seeds (0..n-1)")
        sp.add_argument("--grid", help="comma-separated axis values")
        sp.add_argument("--scheme", help="comma-separated scheme labels to run")
        sp.set_defaults(axis=axis, default_grid=grid, default_variants=variants)

    sp = subs.add_parser("validate", help="run the oracle validation suites")
    _add_common(sp)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=_cmd_validate)

    args = parser.parse_args(argv)
    try:
        if args.command in ("sweep-power", "sweep-angle", "sweep-antennas"):
            return _run_sweep(args, args.axis, args.default_grid, args.default_variants)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2


if __name__ == "__main__":
    sys.exit(main())

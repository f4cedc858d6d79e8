"""Command-line entry point.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 data
error, 4 a model aborted because a series is I(2), 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .errors import ChainArdlError, ConfigError, DataError, EstimationError, IntegrationOrderError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DATA, EXIT_I2 = 0, 1, 2, 3, 4


def _bundled_config() -> Path:
    return Path(str(resources.files("chainardl").joinpath("data", "presets.yaml")))


def cmd_run(args) -> int:
    from .pipeline import exit_code, load_config, run
    path = Path(args.config)
    if args.config == "bundled" and not path.exists():
        path = _bundled_config()
    config = load_config(path, Path(args.output) if args.output else None)
    result = run(config)
    for o in result.outcomes:
        tag = f"{o.model.id} ({o.model.dummy_set})"
        if o.bounds is not None:
            print(f"{tag}: {o.status}, bounds {o.bounds.decision.value} "
                  f"(F = {o.bounds.f_stat:.3f}, k = {o.bounds.k}, case {o.bounds.case})")
        else:
            print(f"{tag}: {o.status}: {o.message}")
    print(f"wrote {len(result.files)} files to {config.output}")
    for o in result.i2_aborts:
        print(f"error: {o.model.id} ({o.model.dummy_set}) aborted: {o.message}", file=sys.stderr)
    return exit_code(result)


def cmd_stats(args) -> int:
    from .frame import descriptive_stats, format_stats, load_csv, stats_records
    frame = load_csv(args.csv)
    rows = descriptive_stats(frame, args.columns or None)
    if args.json:
        print(json.dumps(stats_records(rows), indent=2, sort_keys=True))
    else:
        sys.stdout.write(format_stats(rows))
    return EXIT_OK


def cmd_unitroot(args) -> int:
    from .frame import load_csv
    from .unitroot import adf_test, classify_integration, pp_test
    frame = load_csv(args.csv)
    if args.column not in frame:
        raise ConfigError(f"column {args.column!r} not in {args.csv}; available: {', '.join(frame.names)}")
    x = frame[args.column]
    adf = adf_test(x, args.det, max_lag=args.max_lag, name=args.column)
    pp = pp_test(x, args.det, name=args.column)
    verdict = classify_integration(x, args.det, args.column, args.max_lag)
    for r in (adf, pp):
        lo, hi = r.pvalue_band
        print(f"{r.test:3s} {args.column}: stat {r.stat:.3f}, "
              f"{'lags' if r.test == 'ADF' else 'bandwidth'} {r.lags_or_bandwidth}, nobs {r.nobs}, "
              f"5% cv {r.crit[0.05]:.3f}, p in [{lo:g}, {hi:g}]")
    print(f"order: {verdict.order}")
    for note in verdict.notes:
        print(f"note: {note}")
    return EXIT_OK


def cmd_mc(args) -> int:
    from .experiments import EXPERIMENTS, get_experiment
    from .synth import write_summaries, monte_carlo
    if args.list or not args.experiment:
        for name, e in sorted(EXPERIMENTS.items()):
            print(f"{name:22s} {e.description}")
        return EXIT_OK
    try:
        exp = get_experiment(args.experiment)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    if args.reps < 100:
        raise ConfigError("--reps must be at least 100")
    s = monte_carlo(exp, args.reps, args.seed, args.jobs)
    print(f"{exp.name}: {exp.description}")
    print(f"reps {s.reps}, base seed {s.base_seed}, failures {s.failures}")
    for level, rate in s.rates.items():
        print(f"  rejection at {level:.2f}: {rate:.4f}")
    for q, v in s.quantiles.items():
        print(f"  quantile {q:.2f}: {v:.4f}")
    if args.csv:
        write_summaries([s], args.csv)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chainardl", description="ARDL bounds-testing pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a YAML config ('bundled' runs the shipped presets on the fixture)")
    p.add_argument("config")
    p.add_argument("--output", help="output directory (overrides the config)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("stats", help="descriptive statistics of a CSV file")
    p.add_argument("csv")
    p.add_argument("--columns", nargs="*")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("unitroot", help="ADF and PP tests on one column")
    p.add_argument("csv")
    p.add_argument("--column", required=True)
    p.add_argument("--det", default="const", choices=("none", "const", "const+trend"))
    p.add_argument("--max-lag", type=int, default=None)
    p.set_defaults(func=cmd_unitroot)

    p = sub.add_parser("mc", help="run a named Monte Carlo experiment")
    p.add_argument("experiment", nargs="?")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv", help="write the summary to this CSV file")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_mc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except IntegrationOrderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_I2
    except (EstimationError, ChainArdlError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

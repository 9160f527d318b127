"""Command-line front end for the offloading simulator.

Subcommands: ``convergence`` (greedy energy trace), ``sweep`` (energy
versus a swept parameter, optionally crossed with a second axis), and
``trajectory`` (trip geometry / velocity / forecast report). Exit codes:
0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .channel import TableFormatError
from .results import emit_results, write_json
from .scenario import (
    CONVERGENCE_COLUMNS,
    SAMPLES_COLUMNS,
    SWEEP2_COLUMNS,
    SWEEP_COLUMNS,
    TRIP_CSV_COLUMNS,
    ConfigError,
    ScenarioConfig,
    load_config,
    run_convergence,
    run_sweep,
    run_trajectory_eval,
    trajectory_report_rows,
    trip_sample_rows,
)
from .trajectory import SchemaError, TripParseError, parse_ved_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _parse_grid(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"grid: expected comma-separated numbers, got {text!r}") from None


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="scenario YAML file (defaults to the built-in scenario)")
    parser.add_argument("--seed", type=int, help="override the scenario rng seed")
    parser.add_argument("--out", required=True, help="output file path")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--se-table", help="velocity/se CSV overriding the configured se source")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mecsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    conv = sub.add_parser("convergence", help="emit the greedy optimization trace")
    _add_common(conv)

    sweep = sub.add_parser("sweep", help="optimize one instance across a parameter grid")
    _add_common(sweep)
    sweep.add_argument("--axis", required=True, choices=("velocity", "bandwidth", "datasize"))
    sweep.add_argument("--grid", required=True, help="comma-separated axis values")
    sweep.add_argument("--axis2", choices=("velocity", "bandwidth", "datasize"))
    sweep.add_argument("--grid2", help="comma-separated second-axis values")

    traj = sub.add_parser("trajectory", help="trip geometry and forecast report")
    _add_common(traj)
    traj.add_argument("--trips", help="trip CSV overriding the config's trajectory.trips")
    traj.add_argument(
        "--samples-out", help="also write parsed fixes as CSV (trip_id,timestamp_ms,lat,lon)"
    )

    return parser


def _load_scenario(args) -> ScenarioConfig:
    config = load_config(args.config) if args.config else ScenarioConfig.default()
    if args.seed is not None:
        config = dataclasses.replace(config, rng_seed=args.seed)
    return config


def _cmd_convergence(args) -> int:
    config = _load_scenario(args)
    rows = run_convergence(config, se_table_override=args.se_table)
    emit_results(rows, args.out, args.format, CONVERGENCE_COLUMNS)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = _load_scenario(args)
    rows = run_sweep(
        config,
        axis=args.axis,
        grid=_parse_grid(args.grid),
        axis2=args.axis2,
        grid2=_parse_grid(args.grid2) if args.grid2 else None,
        se_table_override=args.se_table,
    )
    columns = SWEEP2_COLUMNS if args.axis2 else SWEEP_COLUMNS
    emit_results(rows, args.out, args.format, columns)
    return EXIT_OK


def _cmd_trajectory(args) -> int:
    config = _load_scenario(args)
    eval_cfg = config.trajectory_eval
    if eval_cfg is None:
        raise ConfigError("trajectory: the scenario config needs a trajectory section")
    if args.trips:
        eval_cfg = dataclasses.replace(eval_cfg, trips=args.trips)
    report = run_trajectory_eval(eval_cfg)
    if args.format == "json":
        write_json(report, args.out)
    else:
        emit_results(trajectory_report_rows(report), args.out, "csv", TRIP_CSV_COLUMNS)
    if args.samples_out:
        trips = parse_ved_csv(eval_cfg.trips)
        emit_results(trip_sample_rows(trips), args.samples_out, "csv", SAMPLES_COLUMNS)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "convergence": _cmd_convergence,
        "sweep": _cmd_sweep,
        "trajectory": _cmd_trajectory,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, TableFormatError, SchemaError, TripParseError, ValueError) as exc:
        print(f"mecsim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"mecsim: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

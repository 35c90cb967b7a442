"""Command line entry point: ``matchmarket run|claims|list``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import MatchMarketError
from .experiments import (
    EXPERIMENTS,
    ConfigError,
    _to_text,
    claims_report,
    config_from_mapping,
    fig5_tables,
    parse_config_mapping,
    run_experiment,
    write_csv,
)

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2

# flag -> config key
_FLAGS = {
    "n": "comma-separated numbers of variants",
    "m": "comma-separated numbers of buyers",
    "k": "comma-separated k-norm exponents",
    "st": "comma-separated correlations st",
    "t": "correlation strength t in [0, 1]",
    "s": "correlation sign, +1 or -1",
    "rule": "matchmaker rule: linear, min or knorm:<k>",
    "beta": "search cost per examined variant",
    "beta_values": "comma-separated search costs for the N_opt table",
    "gamma": "power-law exponent (> 2)",
    "n_max": "largest number of examined variants",
    "threshold": "target for the expected best buyer average",
    "realizations": "number of Monte Carlo realizations",
    "seed": "master seed (64-bit unsigned)",
    "block_size": "realizations per seeded block",
    "workers": "worker processes",
}


def _add_flags(parser, names):
    for name in names:
        parser.add_argument(f"--{name.replace('_', '-')}", dest=name, metavar="VALUE", help=_FLAGS[name])
    parser.add_argument("--out", help="output CSV path (default: standard output)")
    parser.add_argument("--quiet", action="store_true", help="no progress messages")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matchmarket", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment and write its CSV")
    run.add_argument("experiment", help="experiment name (see `matchmarket list`)")
    run.add_argument("--config", help="flat key = value config file; flags override it")
    _add_flags(run, list(_FLAGS))

    claims = sub.add_parser("claims", help="compute the scalar claims table")
    _add_flags(claims, ["n", "realizations", "seed", "block_size", "workers"])

    sub.add_parser("list", help="list experiments")
    return parser


def _emit(table, out, quiet):
    if out is None:
        sys.stdout.write(_to_text(table))
        return
    write_csv(table, out)
    if not quiet:
        print(f"wrote {out}", file=sys.stderr)


def _raw_flags(args, names) -> dict:
    return {name: getattr(args, name) for name in names if getattr(args, name, None) is not None}


def _run(args) -> int:
    raw = {}
    experiment = args.experiment
    if args.config:
        try:
            raw = parse_config_mapping(Path(args.config).read_text())
        except OSError as exc:
            print(f"matchmarket: cannot read config {args.config}: {exc.strerror}", file=sys.stderr)
            return EXIT_IO
        named = raw.pop("experiment", experiment)
        if named != experiment:
            raise ConfigError(f"config file is for {named!r}, not {experiment!r}")
        raw.pop("out", None)
    raw.update(_raw_flags(args, _FLAGS))
    config = config_from_mapping(experiment, raw)
    progress = not args.quiet
    if experiment == "fig5_search":
        curve, n_opt = fig5_tables(config, progress)
        _emit(curve, args.out, args.quiet)
        if args.out is not None and config.beta_values:
            out = Path(args.out)
            _emit(n_opt, out.with_name(f"{out.stem}_nopt{out.suffix or '.csv'}"), args.quiet)
        return EXIT_OK
    _emit(run_experiment(config, progress), args.out, args.quiet)
    return EXIT_OK


def _claims(args) -> int:
    config = config_from_mapping("claims_table", _raw_flags(args, ["n", "realizations", "seed", "block_size", "workers"]))
    _emit(claims_report(config, progress=not args.quiet), args.out, args.quiet)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        width = max(len(name) for name in EXPERIMENTS)
        for name, text in EXPERIMENTS.items():
            print(f"{name:<{width}}  {text}")
        return EXIT_OK
    try:
        return _run(args) if args.command == "run" else _claims(args)
    except (ConfigError, MatchMarketError, ValueError) as exc:
        print(f"matchmarket: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"matchmarket: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

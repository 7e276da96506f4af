"""Command line interface: ``gqft run | list | explain``."""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigInvalid
from .harness import (
    EXIT_CONFIG,
    HarnessConfig,
    config_from_toml,
    explain,
    list_checks,
    main_run,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gqft",
        description="Numerical verification harness for Galilean quantum "
                    "field theory on finite lattices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run verification suites")
    run_p.add_argument("--config", help="TOML configuration file")
    run_p.add_argument("--suite", action="append",
                       help="restrict to a suite (repeatable)")
    run_p.add_argument("--seed", type=int, help="override the RNG seed")
    run_p.add_argument("--json", help="write the machine-readable report here")
    run_p.add_argument("--serial", action="store_true",
                       help="run suites sequentially")

    list_p = sub.add_parser("list", help="list check identifiers")
    list_p.add_argument("--config", help="TOML configuration file")
    list_p.add_argument("--suite", action="append",
                        help="restrict to a suite (repeatable)")

    explain_p = sub.add_parser("explain", help="print the law a check verifies")
    explain_p.add_argument("check_id")
    return parser


def _load_config(args) -> HarnessConfig:
    config = config_from_toml(args.config) if args.config else HarnessConfig()
    if getattr(args, "suite", None):
        config.suites = tuple(args.suite)
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    config.validate()
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = _load_config(args)
            return main_run(config, json_path=args.json, serial=args.serial)
        if args.command == "list":
            config = _load_config(args)
            for check_id, suite, statement in list_checks(config):
                print(f"{check_id:38s} [{suite}] {statement}")
            return 0
        if args.command == "explain":
            try:
                print(explain(args.check_id))
            except KeyError as exc:
                print(exc.args[0], file=sys.stderr)
                return EXIT_CONFIG
            return 0
    except ConfigInvalid as exc:
        for problem in exc.errors:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())

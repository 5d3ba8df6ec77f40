"""Command line entry point: ``steinlab <group> [suite] [options]``."""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, ResourceBound
from .harness import DEFAULT_CONFIG, GROUPS, emit_report, load_config, normalize_config, run_suite, select

EXIT_FAIL, EXIT_CONFIG, EXIT_BOUND = 1, 2, 3

# flags that override suite parameters when given
OVERRIDES = ("ring", "n", "samples", "count", "level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steinlab", description="Exhaustive checks for Steinberg-group constructions.")
    sub = parser.add_subparsers(dest="group", required=True)
    for group, suites in GROUPS.items():
        p = sub.add_parser(group, help=f"suites: {', '.join(suites)}")
        if group != "all":
            p.add_argument("suite", nargs="?", choices=suites, help="run only this suite")
        p.add_argument("--config", help="YAML or JSON config file (default: bundled instance set)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--format", choices=("json", "text"), default="text")
        p.add_argument("--bound", type=int, help="resource bound on exhaustive enumerations")
        p.add_argument("--ring", help="ring spec such as Zmod:8")
        p.add_argument("--n", type=int, help="matrix size")
        p.add_argument("--samples", type=int, help="sample count")
        p.add_argument("--count", type=int, help="random word count")
        p.add_argument("--level", type=int, help="homotope level")
    return parser


def make_config(args) -> dict:
    config = load_config(args.config) if args.config else normalize_config(DEFAULT_CONFIG)
    if args.seed is not None:
        config["seed"] = args.seed
    if args.bound is not None:
        if args.bound <= 0:
            raise ConfigError("bound must be positive")
        config["bound"] = args.bound
    config = select(config, args.group, getattr(args, "suite", None))
    for suite in config["suites"]:
        for key in OVERRIDES:
            value = getattr(args, key)
            if value is not None:
                suite[key] = value
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = make_config(args)
        report = run_suite(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceBound as exc:
        partial = exc.details.get("report")
        if partial is not None and partial.suites:
            sys.stdout.buffer.write(emit_report(partial, args.format))
        print(f"resource bound exceeded: {exc}", file=sys.stderr)
        return EXIT_BOUND
    sys.stdout.buffer.write(emit_report(report, args.format))
    if args.format == "json":
        sys.stdout.buffer.write(b"\n")
    return 0 if report.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``aoi-mac run`` and ``aoi-mac report``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .errors import InvalidArgumentError, NumericFailureError
from .experiment import ConfigError, load_config, run_sweep, with_seed, write_csv_atomic
from .report import ReportError, compare_report

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4

log = logging.getLogger("aoi_mac")


def run_experiment(config, csv=None, svg_dir=None, seed=None, workers=None) -> int:
    try:
        cfg = load_config(config)
    except ConfigError as exc:
        for msg in exc.messages:
            print(msg, file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, UnicodeDecodeError) as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if seed is not None:
        cfg = with_seed(cfg, seed)
    if workers is not None:
        if workers < 1:
            print("--workers must be >= 1", file=sys.stderr)
            return EXIT_CONFIG
        cfg = replace(cfg, workers=workers)
    csv_path = Path(csv) if csv else cfg.csv_path or Path(config).with_suffix(".csv")
    svg = Path(svg_dir) if svg_dir else cfg.svg_dir

    try:
        rows = run_sweep(cfg)
    except InvalidArgumentError as exc:
        print(f"invalid experiment: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    try:
        write_csv_atomic(rows, csv_path)
        log.info("wrote %d rows to %s", len(rows), csv_path)
        if svg is not None:
            from .plotting import render_figures

            for path in render_figures(rows, svg):
                log.info("wrote %s", path)
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aoi-mac", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a power sweep and write CSV (and SVG) output")
    run.add_argument("--config", required=True, help="flat key = value experiment file")
    run.add_argument("--csv", help="output CSV path (overrides the config)")
    run.add_argument("--svg-dir", help="directory for SVG plots (overrides the config)")
    run.add_argument("--seed", type=int, help="base seed (overrides the config)")
    run.add_argument("--workers", type=int, help="worker processes")

    rep = sub.add_parser("report", help="summarise which scheme wins per power")
    rep.add_argument("--csv", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    if args.command == "run":
        return run_experiment(args.config, args.csv, args.svg_dir, args.seed, args.workers)
    try:
        sys.stdout.write(compare_report(args.csv))
    except ReportError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read CSV: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

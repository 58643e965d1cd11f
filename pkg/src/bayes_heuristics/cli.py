"""Command-line entry point: ``bayes-heuristics run|batch|diagnose``.

Exit codes: 0 success, 2 validation error, 3 numerical failure.
Set ``BAYES_HEURISTICS_LOG`` (e.g. ``DEBUG``) to change log verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .errors import HeuristicsError, ValidationError
from .harness import diagnose, emit, load_scenario, run
from .harness.emit import dumps
from .harness.runner import is_numerical

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3

log = logging.getLogger("bayes_heuristics")


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, ValidationError):
        return EXIT_VALIDATION
    if is_numerical(exc):
        return EXIT_NUMERICAL
    return EXIT_VALIDATION


def _run_one(path, out, fmt, seed=None) -> int:
    try:
        scenario = load_scenario(path)
        if seed is not None:
            scenario = scenario.with_seed(seed)
        report = run(scenario)
        for f in emit(report, fmt, out):
            print(f)
    except HeuristicsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    return EXIT_OK


def cmd_run(args) -> int:
    return _run_one(args.scenario, args.out, args.format, args.seed)


def cmd_batch(args) -> int:
    paths = sorted(Path(args.directory).glob("*.json"))
    if not paths:
        print(f"error: no *.json scenarios in {args.directory}", file=sys.stderr)
        return EXIT_VALIDATION
    out = args.out or Path(args.directory) / "out"
    with ProcessPoolExecutor(max_workers=args.jobs) as pool:
        codes = list(pool.map(_run_one, paths, [out] * len(paths), [args.format] * len(paths)))
    return max(codes)


def cmd_diagnose(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
        if args.seed is not None:
            scenario = scenario.with_seed(args.seed)
        print(dumps({"scenario": scenario.name, "mode": scenario.mode.value, "diagnostics": diagnose(scenario)}))
    except HeuristicsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bayes-heuristics", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one scenario and write its report")
    p.add_argument("scenario")
    p.add_argument("--out", default=".", help="output directory (default: .)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("batch", help="run every *.json scenario in a directory")
    p.add_argument("directory")
    p.add_argument("--out", help="output directory (default: DIRECTORY/out)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=None, help="worker processes")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("diagnose", help="print verdicts without simulating trajectories")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("BAYES_HEURISTICS_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point: ``pondera sweep`` and ``pondera check``.

Exit codes: 0 success, 1 configuration error (or a failed check), 2 at least
one errored sweep cell, 3 output I/O failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import PRESETS, parse_config
from .errors import ConfigError

EXIT_OK, EXIT_CONFIG, EXIT_CELLS, EXIT_IO = 0, 1, 2, 3


def _threads(arg: int | None) -> int:
    if arg is not None:
        value = arg
    else:
        env = os.environ.get("PONDERA_THREADS", "").strip()
        if not env:
            return 1
        try:
            value = int(env)
        except ValueError:
            raise ConfigError([f"PONDERA_THREADS must be an integer, got {env!r}"]) from None
    if value < 1:
        raise ConfigError([f"thread count must be >= 1, got {value}"])
    return value


def cmd_sweep(args) -> int:
    from .sweep import emit_csv, run_sweep

    try:
        if args.config is None and args.preset is None:
            raise ConfigError(["either --config or --preset is required"])
        text = ""
        if args.config is not None:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    text = fh.read()
            except (OSError, UnicodeDecodeError) as exc:
                raise ConfigError([f"cannot read config {args.config}: {exc}"]) from None
        config = parse_config(text, preset=args.preset)
        workers = _threads(args.threads)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG

    result = run_sweep(config, workers=workers)
    try:
        emit_csv(result, args.out or "-")
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_IO
    if result.error_count:
        print(f"{result.error_count} of {len(result.rows)} cells errored", file=sys.stderr)
        return EXIT_CELLS
    return EXIT_OK


def cmd_check(args) -> int:
    from .checks import run_checks

    results = run_checks()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pondera", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sweep = sub.add_parser("sweep", help="run a frequency/temperature sweep and write CSV")
    sweep.add_argument("--config", help="key = value configuration file")
    sweep.add_argument("--out", help="output CSV path (default: stdout)")
    sweep.add_argument("--preset", choices=PRESETS, help="figure preset; explicit config keys override it")
    sweep.add_argument("--threads", type=int, help="worker processes (default: $PONDERA_THREADS or 1)")
    sweep.set_defaults(func=cmd_sweep)
    check = sub.add_parser("check", help="run the built-in invariant suite")
    check.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: sweep, fit, and selftest subcommands.

Exit status: 0 on full success, 2 when some sweep rows failed (the CSV is
still written with those rows flagged), 1 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import sys

from . import harness
from .errors import SlowlightError, UsageError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="slowlight", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a sweep config and write its CSV")
    sweep.add_argument("config", help="path to an INI sweep file or a shipped name "
                                      "(fig2a, fig2b, fig3ai, fig3bi, fig4a)")
    sweep.add_argument("--out", default=None, help="output CSV path")
    sweep.add_argument("--workers", type=int, default=1, help="worker processes")
    sweep.add_argument("--grid-scale", type=float, default=1.0,
                       help="uniform resolution scaling for convergence studies")

    fit = sub.add_parser("fit", help="fit the transparency window to a slowing CSV")
    fit.add_argument("csv", help="slowing-sweep CSV path")

    sub.add_parser("selftest", help="run fast built-in sanity checks")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "sweep":
            result = harness.run_sweep(
                args.config, out=args.out, workers=args.workers, grid_scale=args.grid_scale
            )
            print(f"wrote {result.path} ({len(result.rows)} rows)")
            for index, message in result.failures:
                print(f"row {index} failed: {message}", file=sys.stderr)
            return 2 if result.failures else 0
        if args.command == "fit":
            fit = harness.fit_transparency_window(args.csv)
            flag = " (flagged: unidentifiable)" if fit.flagged else ""
            print(f"window_hz = {fit.window_hz:.9g}  residual = {fit.residual:.3e}{flag}")
            return 0
        if args.command == "selftest":
            return harness.selftest()
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SlowlightError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

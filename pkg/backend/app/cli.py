"""Command-line front door.

    eval   FILE [--max-steps n]
    trace  FILE [--max-steps n] [--seed s]
    verify --suite {tags,games,machine,pcf} [--depth n] [--seeds n] [--seed s]
    dump   FILE

Exit codes: 0 success, 1 input or usage error, 2 divergence, 3 internal
invariant failure.
"""

import argparse
import logging
import sys
from typing import List, Optional

from app.suites import SUITES, run_suite
from app.workbench import dump_source, evaluate_source, trace_source
from setup.init import DEFAULT_SEED, MAX_STEPS, VERIFY_DEPTH, VERIFY_SEEDS
from utils.errors import (
    Diverged, IllegalPosition, MachineError, PcfSyntaxError, PcfTypeError, StrategyError, TagError,
)
from utils.util import read_source

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_INPUT, EXIT_DIVERGED, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{value} is not positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dpcf", description="Game-semantics workbench for PCF and j-pushdown machines")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ev = commands.add_parser("eval", help="evaluate a closed nat or bool program")
    ev.add_argument("file")
    ev.add_argument("--max-steps", type=_positive, default=MAX_STEPS)

    tr = commands.add_parser("trace", help="print the play with tape and stack snapshots")
    tr.add_argument("file")
    tr.add_argument("--max-steps", type=_positive, default=MAX_STEPS)
    tr.add_argument("--seed", type=int, default=DEFAULT_SEED)

    ver = commands.add_parser("verify", help="run an invariant suite")
    ver.add_argument("--suite", required=True, choices=sorted(SUITES))
    ver.add_argument("--depth", type=_positive, default=VERIFY_DEPTH)
    ver.add_argument("--seeds", type=_positive, default=VERIFY_SEEDS)
    ver.add_argument("--seed", type=int, default=DEFAULT_SEED)

    du = commands.add_parser("dump", help="print the description tree and the compiled machine")
    du.add_argument("file")
    return parser


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "verify":
        report = run_suite(args.suite, args.depth, args.seeds, args.seed)
        print(report.summary())
        for failure in report.failures:
            print(f"  FAIL {failure}")
        return EXIT_OK if report.ok else EXIT_INTERNAL
    source = read_source(args.file)
    if args.command == "eval":
        print(evaluate_source(source, args.max_steps).text)
    elif args.command == "trace":
        print(trace_source(source, args.max_steps, args.seed).text)
    else:
        print(dump_source(source))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return _dispatch(args)
    except (PcfSyntaxError, PcfTypeError) as e:
        logger.error(f"Input error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except Diverged as e:
        logger.info(f"Diverged: {e}")
        print("DIVERGED")
        return EXIT_DIVERGED
    except (MachineError, IllegalPosition, StrategyError, TagError) as e:
        logger.error(f"Internal invariant failure: {e}")
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""
PCF_H Command Line
==================

Evaluation, normal-form classification, derivation checking, tight
synthesis, step prediction and diamond testing over ``.pcfh`` files and
derivation JSON.

Example Usage:
    python cli.py eval programs/doubling.pcfh --trace
    python cli.py synth programs/doubling.pcfh -o doubling.json
    python cli.py check doubling.json --require-tight
"""

import argparse
import logging
import sys
from functools import partial
from pathlib import Path
from typing import Callable, Optional, Sequence

from batch import Outcome, combined_exit_code, run_batch_sync
from config import ConfigError, Settings, load_settings
from derivation import CheckError, DecodeError, check_derivation, dumps, format_judgment, is_tight, loads
from evaluation import OpenTermError, classify_nf, diamond_check, evaluate, trace_lines
from programs import resolve_input
from progress import file_header, print_batch_header, print_batch_summary
from reader import ParseError, print_term, read_term_file
from synth import (
    BoundViolated,
    FuelExhausted,
    OpenSubject,
    StuckNormalForm,
    counter_summary,
    synthesize_tight,
    verify_upper_bound,
)
from syntax import free_vars
from typesystem import format_multitype


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2
EXIT_STUCK = 3
EXIT_FUEL = 4


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"[ERROR] {message}\n")


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subcommand per operation."""
    parser = _Parser(
        prog="pcfh",
        description="PCF_H evaluator and quantitative type checker",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Evaluate and show every step
  python cli.py eval programs/doubling.pcfh --trace

  # Synthesize the tight derivation and save it
  python cli.py synth programs/doubling.pcfh -o doubling.json

  # Check a derivation and insist that it is tight
  python cli.py check doubling.json --require-tight

  # Predict step counts for several files, four at a time
  python cli.py predict programs/*.pcfh --verify --jobs 4

Exit Codes:
  0 success, 1 usage or parse error, 2 check or verification failure,
  3 stuck normal form, 4 fuel exhausted

Environment Variables:
  PCFH_FUEL, PCFH_STRATEGY, PCFH_STRICT_ZERO, PCFH_JOBS
        """,
    )

    common = _Parser(add_help=False)
    common.add_argument("files", nargs="+", type=Path, help="Input files, or names of bundled programs")
    common.add_argument("--config", type=Path, default=None, help="JSON settings file (default: ./.pcfh.json, then ~/.pcfh.json)")
    common.add_argument("--jobs", type=int, default=None, help="Files processed concurrently (default: 1)")
    common.add_argument("--verbose", action="store_true", help="Log every step to stderr")

    running = _Parser(add_help=False)
    running.add_argument("--fuel", type=int, default=None, help="Maximum evaluation steps (default: 10000); with 0 only normal forms succeed")
    running.add_argument("--strategy", choices=("left", "right"), default=None, help="Application side reduced first (default: left)")

    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = commands.add_parser("eval", parents=[common, running], help="Evaluate to normal form")
    p.add_argument("--trace", action="store_true", help="Print every step")

    commands.add_parser("nf", parents=[common], help="Classify as abs, nat, stuck or reducible")

    p = commands.add_parser("check", parents=[common], help="Check derivation JSON")
    p.add_argument("--require-tight", action="store_true", help="Also require a tight derivation")
    p.add_argument("--strict-zero", action="store_true", default=None, help="Allow at most one 0t per t-zero")

    p = commands.add_parser("synth", parents=[common, running], help="Synthesize the tight derivation")
    p.add_argument("-o", "--output", type=Path, default=None, help="Write the derivation JSON here")
    p.add_argument("--check-steps", action="store_true", default=None, help="Check every intermediate derivation")

    p = commands.add_parser("predict", parents=[common, running], help="Predict the step counter")
    p.add_argument("--verify", action="store_true", help="Re-evaluate and compare with the prediction")

    commands.add_parser("diamond", parents=[common], help="Close every pair of one-step reducts")
    return parser


def _read_closed(path: Path):
    t = read_term_file(resolve_input(path))
    if free_vars(t):
        raise OpenTermError(t)
    return t


def _guarded(handler: Callable[[Path, argparse.Namespace, Settings], Outcome]):
    """Map the library's exceptions to exit codes and diagnostics."""

    def run(path: Path, args: argparse.Namespace, settings: Settings) -> Outcome:
        try:
            return handler(path, args, settings)
        except OSError as e:
            return Outcome(EXIT_USAGE, err=(f"[ERROR] cannot read {path}: {e.strerror or e}",))
        except ParseError as e:
            return Outcome(EXIT_USAGE, err=(f"[ERROR] {path}: {e}",))
        except (OpenTermError, OpenSubject) as e:
            return Outcome(EXIT_USAGE, err=(f"[ERROR] {path}: {e}",))
        except DecodeError as e:
            return Outcome(EXIT_USAGE, err=(f"[ERROR] {path}: not a derivation: {e}",))
        except StuckNormalForm as e:
            return Outcome(EXIT_STUCK, out=(f"stuck {print_term(e.trace.final)}",), err=(f"[ERROR] {e}",))
        except FuelExhausted as e:
            return Outcome(EXIT_FUEL, err=(f"[ERROR] {e}",))

    return run


@_guarded
def cmd_eval(path: Path, args: argparse.Namespace, settings: Settings) -> Outcome:
    trace = evaluate(_read_closed(path), settings.fuel, settings.strategy)
    out = []
    if args.trace:
        out.extend(trace_lines(trace))
    if trace.exhausted:
        return Outcome(EXIT_FUEL, tuple(out), (f"[ERROR] no normal form within {len(trace)} steps",))
    out.append(print_term(trace.final))
    out.append(f"nature {trace.nature.value}")
    out.append(counter_summary(trace.counter))
    if not trace.nature.is_proper:
        return Outcome(EXIT_STUCK, tuple(out), ("[ERROR] evaluation ends in a stuck normal form",))
    return Outcome(EXIT_OK, tuple(out))


@_guarded
def cmd_nf(path: Path, args: argparse.Namespace, settings: Settings) -> Outcome:
    nature = classify_nf(_read_closed(path))
    return Outcome(EXIT_OK, ("reducible" if nature is None else nature.value,))


@_guarded
def cmd_check(path: Path, args: argparse.Namespace, settings: Settings) -> Outcome:
    d = loads(Path(path).read_text(encoding="utf-8"))
    try:
        judgment = check_derivation(d, strict_zero=settings.strict_zero)
    except CheckError as e:
        return Outcome(EXIT_FAILED, err=(f"[ERROR] check failed at {list(e.path)}: {e.reason.value}: {e.detail}",))
    if args.require_tight and not is_tight(d):
        return Outcome(EXIT_FAILED, err=("[ERROR] derivation is not tight",))
    return Outcome(EXIT_OK, (f"ok: {format_judgment(judgment)}",))


@_guarded
def cmd_synth(path: Path, args: argparse.Namespace, settings: Settings) -> Outcome:
    result = synthesize_tight(_read_closed(path), settings.fuel, settings.strategy, settings.check_steps)
    d = result.derivation
    out = [str(d.counter), f"type {format_multitype(d.result)}"]
    if args.output is not None:
        args.output.write_text(dumps(d) + "\n", encoding="utf-8")
        out.append(f"wrote {args.output}")
    return Outcome(EXIT_OK, tuple(out))


@_guarded
def cmd_predict(path: Path, args: argparse.Namespace, settings: Settings) -> Outcome:
    t = _read_closed(path)
    result = synthesize_tight(t, settings.fuel, settings.strategy)
    predicted = result.derivation.counter
    out = [str(predicted)]
    if args.verify:
        try:
            report = verify_upper_bound(result.derivation)
        except (BoundViolated, CheckError) as e:
            return Outcome(EXIT_FAILED, tuple(out), (f"[ERROR] verification failed: {e}",))
        observed = evaluate(t, settings.fuel, settings.strategy).counter
        if observed != predicted:
            return Outcome(EXIT_FAILED, tuple(out), (f"[ERROR] evaluation fired {observed}, predicted {predicted}",))
        out.append(f"verified: {report}")
    return Outcome(EXIT_OK, tuple(out))


@_guarded
def cmd_diamond(path: Path, args: argparse.Namespace, settings: Settings) -> Outcome:
    report = diamond_check(_read_closed(path))
    if not report.pairs:
        return Outcome(EXIT_OK, ("no pair of distinct reducts",))
    out = []
    for pair in report.pairs:
        left = f"{pair.left.rule.value} at {[p.value for p in pair.left.path]}"
        right = f"{pair.right.rule.value} at {[p.value for p in pair.right.path]}"
        if pair.joined:
            out.append(f"join {left} / {right} : {print_term(pair.join)}")
        else:
            out.append(f"counterexample {left} / {right}")
    if not report.ok:
        return Outcome(EXIT_FAILED, tuple(out), ("[ERROR] diamond property fails",))
    return Outcome(EXIT_OK, tuple(out))


HANDLERS = {
    "eval": cmd_eval,
    "nf": cmd_nf,
    "check": cmd_check,
    "synth": cmd_synth,
    "predict": cmd_predict,
    "diamond": cmd_diamond,
}


def _overrides(args: argparse.Namespace) -> dict:
    return {
        "fuel": getattr(args, "fuel", None),
        "strategy": getattr(args, "strategy", None),
        "strict_zero": getattr(args, "strict_zero", None),
        "jobs": args.jobs,
        "check_steps": getattr(args, "check_steps", None),
    }


def _emit(outcome: Outcome) -> None:
    for line in outcome.out:
        print(line)
    for line in outcome.err:
        print(line, file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="[%(levelname)s] %(message)s",
        stream=sys.stderr,
        force=True,
    )

    try:
        settings = load_settings(args.config, overrides=_overrides(args))
    except ConfigError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_USAGE

    if getattr(args, "output", None) is not None and len(args.files) > 1:
        print("[ERROR] -o needs exactly one input file", file=sys.stderr)
        return EXIT_USAGE

    worker = partial(HANDLERS[args.command], args=args, settings=settings)
    if len(args.files) == 1:
        outcome = worker(args.files[0])
        _emit(outcome)
        return outcome.code

    print_batch_header(args.command, len(args.files), settings.jobs)
    outcomes = run_batch_sync(args.files, worker, settings.jobs)
    for path, outcome in zip(args.files, outcomes):
        print(file_header(path))
        _emit(outcome)
    print_batch_summary(outcomes)
    return combined_exit_code(outcomes)


if __name__ == "__main__":
    sys.exit(main())

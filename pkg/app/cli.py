"""Console entry point (``snpbench``).

Exit codes: 0 success, 1 strict-policy violation or verification mismatch, 2 usage, parse or
convention error. Results go to stdout, logs to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, TextIO

import structlog

from app.config import settings
from app.counter.translate import materialize, translate
from app.dsl import print_cm
from app.errors import DslSyntaxError, StrictPolicyViolation, WorkbenchError
from app.schemas import TraceRecord
from app.services import (
    encode_tape,
    execute_run,
    input_encoder_text,
    load,
    run_response,
    universal_text,
    validate_source,
    verify_tape,
)
from app.snp.engine import StepRecord
from app.snp.model import SnpSystem
from app.turing import TmSpec, encode_params
from app.universal.verify import decode_output

logger = structlog.get_logger()

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


def configure_logging(verbose: int) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    structlog.configure(
        processors=[
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.dev.ConsoleRenderer(),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        context_class=dict,
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
    )


def parse_schedule(text: str) -> dict[int, int]:
    """``t count`` per line; blank lines and ``#`` comments are skipped."""
    schedule: dict[int, int] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise DslSyntaxError("schedule lines are 't count'", number, 1)
        t, count = int(parts[0]), int(parts[1])
        if t < 1:
            raise DslSyntaxError("schedule times start at 1", number, 1)
        schedule[t] = schedule.get(t, 0) + count
    return schedule


def format_schedule(schedule: dict[int, int]) -> str:
    return "".join(f"{t} {count}\n" for t, count in sorted(schedule.items()))


def _cells(text: str) -> list[int]:
    try:
        return [int(c) for c in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected symbol indices, got {text!r}") from None


def _emit(text: str, path: Path | None, out: TextIO) -> None:
    if path is None:
        out.write(text)
    else:
        path.write_text(text)
        logger.info("written", path=str(path), bytes=len(text))


# Subcommands


def cmd_validate(args: argparse.Namespace, out: TextIO) -> int:
    report = validate_source(args.file.read_text())
    for problem in report.problems:
        where = f"{args.file}:{problem.line}:{problem.column}: " if problem.line is not None else f"{args.file}: "
        out.write(f"{where}{problem.message}\n")
    if report.valid:
        out.write(f"{report.kind} {report.name}: ok\n")
        return EXIT_OK
    return EXIT_USAGE


def cmd_run(args: argparse.Namespace, out: TextIO) -> int:
    system = load(args.file.read_text(), SnpSystem)
    schedule = parse_schedule(args.input.read_text()) if args.input else {}
    trace_file = args.trace.open("w") if args.trace else None
    sink: Callable[[StepRecord], None] | None = None
    if trace_file is not None:

        def sink(record: StepRecord) -> None:
            trace_file.write(TraceRecord.from_step(record).model_dump_json() + "\n")

    try:
        trace = execute_run(
            system,
            schedule,
            policy=args.policy,
            seed=args.seed,
            max_steps=args.max_steps,
            snapshots=args.snapshots or None,
            sink=sink,
        )
    finally:
        if trace_file is not None:
            trace_file.close()

    if trace.violation is not None:
        out.write(f"strict policy violation: {trace.violation}\n")
        return EXIT_MISMATCH
    response = run_response(system, trace)
    if response.output is None:
        out.write(f"no output ({response.halt_reason})\n")
    elif args.tm:
        spec = load(args.tm.read_text(), TmSpec)
        cells = decode_output(response.output, spec, encode_params(spec))
        out.write(" ".join(f"a{c}" for c in cells) + "\n")
    else:
        out.write(f"{response.output}\n")
    return EXIT_OK


def cmd_build_universal(args: argparse.Namespace, out: TextIO) -> int:
    response = universal_text(load(args.file.read_text(), TmSpec))
    _emit(response.text, args.output, out)
    for overlap in response.overlaps:
        logger.warning("guard_overlap", overlap=overlap)
    return EXIT_OK


def cmd_build_input_encoder(args: argparse.Namespace, out: TextIO) -> int:
    response = input_encoder_text(load(args.file.read_text(), TmSpec), args.cells)
    _emit(response.text, args.output, out)
    if response.schedule is not None:
        out.write(f"# emits {response.expected_spikes} spikes at t={response.expected_time}\n")
        out.write(format_schedule(response.schedule))
    return EXIT_OK


def cmd_encode(args: argparse.Namespace, out: TextIO) -> int:
    spec = load(args.file.read_text(), TmSpec)
    response = encode_tape(spec, args.tape, args.head, args.state)
    out.write(f"# X={response.X} Y={response.Y} code={response.code} z={response.z} period={response.period}\n")
    out.write(format_schedule(response.schedule))
    return EXIT_OK


def cmd_translate_cm(args: argparse.Namespace, out: TextIO) -> int:
    system = load(args.file.read_text(), SnpSystem)
    translation = translate(system, args.state_cap)
    program = materialize(translation)
    stats = translation.stats()
    text = print_cm(program) + f"# x_r={stats.x_r} m={stats.m} states={stats.states}\n"
    _emit(text, args.output, out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, out: TextIO) -> int:
    spec = load(args.file.read_text(), TmSpec)
    report = verify_tape(spec, args.tape, args.head, args.state, args.steps)
    for check in report.boundaries:
        status = "PASS" if check.ok else "FAIL"
        detail = f"  {check.detail}" if check.detail else ""
        out.write(f"{status} boundary {check.n} t={check.t}{detail}\n")
    if report.halted:
        out.write(f"halted: emitted {report.output}, expected {report.expected_output}\n")
    for problem in report.problems:
        out.write(f"FAIL {problem}\n")
    out.write(f"{'PASS' if report.ok else 'FAIL'} {report.machine}: {len(report.boundaries)} boundaries\n")
    return EXIT_OK if report.ok else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="snpbench", description="Spiking neural P system workbench")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log more (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse a document and list its problems")
    p.add_argument("file", type=Path)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("run", help="run an SN P system")
    p.add_argument("file", type=Path)
    p.add_argument("--input", type=Path, help="schedule file, one 't count' per line")
    p.add_argument("--policy", choices=["first", "seeded", "strict"], default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--trace", type=Path, help="write one JSON record per step")
    p.add_argument("--snapshots", action="store_true", help="record contents in every trace line")
    p.add_argument("--tm", type=Path, help="decode the emission as a tape of this machine")
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("build-universal", help="compile a TM into the ten-neuron system")
    p.add_argument("file", type=Path)
    p.add_argument("-o", "--output", type=Path)
    p.set_defaults(handler=cmd_build_universal)

    p = sub.add_parser("build-input-encoder", help="build the six-neuron input encoder")
    p.add_argument("file", type=Path)
    p.add_argument("-o", "--output", type=Path)
    p.add_argument("--cells", type=_cells, help="left tape cells; prints their input word")
    p.set_defaults(handler=cmd_build_input_encoder)

    p = sub.add_parser("encode", help="encode a tape as the universal system's loading schedule")
    p.add_argument("file", type=Path)
    p.add_argument("--tape", type=_cells, default=[1])
    p.add_argument("--head", type=int, default=0)
    p.add_argument("--state", type=int, default=1)
    p.set_defaults(handler=cmd_encode)

    p = sub.add_parser("translate-cm", help="translate a standard SN P system into a counter machine")
    p.add_argument("file", type=Path)
    p.add_argument("-o", "--output", type=Path)
    p.add_argument("--state-cap", type=int, default=settings.cm_state_cap)
    p.set_defaults(handler=cmd_translate_cm)

    p = sub.add_parser("verify", help="check the universal system against the arithmetic oracle")
    p.add_argument("file", type=Path)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--tape", type=_cells, default=[1])
    p.add_argument("--head", type=int, default=0)
    p.add_argument("--state", type=int, default=1)
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv: list[str] | None = None, out: TextIO | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    out = out or sys.stdout
    try:
        return args.handler(args, out)
    except StrictPolicyViolation as e:
        out.write(f"strict policy violation: {e}\n")
        return EXIT_MISMATCH
    except (WorkbenchError, OSError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        logger.debug("command_failed", command=args.command, error=str(e))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

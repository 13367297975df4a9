"""Command-line entry point.

Exit codes: 0 all assertions passed, 1 at least one failure verdict,
2 spec/usage/parse error, 3 I/O or protocol error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .dsl import dump_ast, parse_spec
from .engine.monitor import Monitor
from .engine.traces import FAILURE, MATCH, render_trace, verdict_to_json
from .errors import IngestError, ProtocolError, SpecError, StreamOrderError
from .ingest import read_event_stream, serve_live
from .scenario import DEFAULT_SEED, drawn_fault, generate_run, run_filename, scenario, write_run

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_SPEC = 2
EXIT_IO = 3


def _load_spec(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            source = handle.read()
    except OSError as exc:
        raise SpecError(f"cannot read spec {path}: {exc.strerror}") from None
    return parse_spec(source)


class _Printer:
    def __init__(self, json_output: bool, show_quiet: bool):
        self.json_output = json_output
        self.show_quiet = show_quiet
        self.failures = 0

    def emit(self, verdict) -> None:
        if verdict.kind == FAILURE:
            self.failures += 1
        if verdict.kind not in (MATCH, FAILURE) and not self.show_quiet:
            return
        if self.json_output:
            print(json.dumps(verdict_to_json(verdict), sort_keys=True), flush=True)
        else:
            print(render_trace(verdict), end="\n\n", flush=True)


def _run_stream(spec, events, args) -> int:
    printer = _Printer(args.json_output, args.report_vacuous)
    monitor = Monitor(
        spec,
        eot=args.eot,
        report_vacuous=True if args.report_vacuous else None,
        skip_disorder=args.skip_disorder,
    )
    dropped = 0
    for event in events:
        for verdict in monitor.step(event):
            printer.emit(verdict)
        if monitor.dropped > dropped:
            dropped = monitor.dropped
            print(f"warning: dropped out-of-order event seq {event.seq}", file=sys.stderr)
    for verdict in monitor.finish():
        printer.emit(verdict)
    return EXIT_FAILED if printer.failures else EXIT_OK


def _ingest_error(exc) -> None:
    print(f"warning: skipped event: {exc}", file=sys.stderr)


def cmd_check(args) -> int:
    spec = _load_spec(args.spec)
    events = read_event_stream(
        args.events, strict=args.strict, on_error=None if args.strict else _ingest_error
    )
    return _run_stream(spec, events, args)


def cmd_monitor(args) -> int:
    spec = _load_spec(args.spec)
    if args.endpoint in ("-", "stdin"):
        events = read_event_stream(
            "-", strict=args.strict, on_error=None if args.strict else _ingest_error
        )
    else:
        events = serve_live(
            args.endpoint,
            strict=args.strict,
            on_error=None if args.strict else _ingest_error,
            ready=lambda addr: print(f"listening on {addr[0]}:{addr[1]}", file=sys.stderr),
        )
    return _run_stream(spec, events, args)


def cmd_parse(args) -> int:
    spec = _load_spec(args.spec)
    text = dump_ast(spec)
    if text:
        print(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    sc = scenario(args.scenario, args.seed)
    os.makedirs(args.out, exist_ok=True)
    for run_index in range(1, args.runs + 1):
        path = write_run(sc, run_index, args.out)
        fault = drawn_fault(sc, run_index)
        count = len(generate_run(sc, run_index))
        label = f"fault={fault}" if fault else "clean"
        print(f"{run_filename(sc, run_index)}: {count} events, {label}")
    return EXIT_OK


def _add_stream_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--eot", choices=("strong", "weak"), default="strong",
                        help="end-of-stream policy for pending attempts")
    parser.add_argument("--report-vacuous", action="store_true",
                        help="also report vacuous and incomplete verdicts")
    parser.add_argument("--json-output", action="store_true",
                        help="one JSON verdict object per line instead of traces")
    strictness = parser.add_mutually_exclusive_group()
    strictness.add_argument("--strict", dest="strict", action="store_true", default=True,
                            help="malformed event lines are fatal (default)")
    strictness.add_argument("--lenient", dest="strict", action="store_false",
                            help="drop malformed event lines with a warning")
    parser.add_argument("--skip-disorder", action="store_true",
                        help="warn and drop out-of-order events instead of aborting")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oroboro",
        description="Temporal-assertion monitor for agent tool-call event streams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="replay a JSONL event log against a spec")
    check.add_argument("spec", help="assertion spec (.ote)")
    check.add_argument("events", help="JSONL event log, or - for stdin")
    _add_stream_flags(check)
    check.set_defaults(func=cmd_check)

    mon = sub.add_parser("monitor", help="monitor a live stream (tcp:host:port or stdin)")
    mon.add_argument("spec", help="assertion spec (.ote)")
    mon.add_argument("endpoint", help="tcp:host:port to listen on, or - for stdin")
    _add_stream_flags(mon)
    mon.set_defaults(func=cmd_monitor)

    par = sub.add_parser("parse", help="parse a spec and print its tree")
    par.add_argument("spec", help="assertion spec (.ote)")
    par.set_defaults(func=cmd_parse)

    sim = sub.add_parser("simulate", help="generate scenario event logs")
    sim.add_argument("scenario", choices=("strong", "weak"))
    sim.add_argument("--seed", type=int, default=DEFAULT_SEED,
                     help="scenario seed (default: the canonical seed)")
    sim.add_argument("--runs", type=int, default=10, help="number of runs to write")
    sim.add_argument("--out", default=".", help="output directory")
    sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"oroboro: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (IngestError, StreamOrderError, ProtocolError) as exc:
        print(f"oroboro: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"oroboro: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

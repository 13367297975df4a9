"""Event wire format and stream sources.

Events travel as JSON Lines: one object per line, UTF-8, with keys
"seq", "ts", "type", "tool", "agent", "args".  Unknown keys are
preserved on the Event but invisible to predicates.  The live TCP
protocol is a two-line handshake (`OROBORO/1` -> `OK`) followed by one
record per newline-terminated line; protocol errors answer `ERR <reason>`.
"""

from __future__ import annotations

import json
import queue
import socket
import sys
import threading

from .engine.events import EVENT_TYPES, Event
from .engine.monitor import DEFAULT_SAMPLING
from .engine.predicates import eval_body
from .errors import IngestError, ProtocolError

MAX_LINE_BYTES = 64 * 1024
HANDSHAKE = "OROBORO/1"

_CORE_KEYS = ("seq", "ts", "type", "tool", "agent", "args")


def decode_event_line(line: str, lineno: int = 1) -> Event:
    """Decode one JSONL record into an Event."""
    if len(line.encode("utf-8")) > MAX_LINE_BYTES:
        raise IngestError(lineno, f"line exceeds {MAX_LINE_BYTES} bytes")
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise IngestError(lineno, f"malformed JSON ({exc.msg})") from None
    if not isinstance(record, dict):
        raise IngestError(lineno, "record is not a JSON object")

    def bad(msg):
        raise IngestError(lineno, msg)

    seq = record.get("seq")
    if not isinstance(seq, int) or isinstance(seq, bool) or seq < 1:
        bad('"seq" must be a positive integer')
    ts = record.get("ts")
    if not isinstance(ts, (int, float)) or isinstance(ts, bool) or ts < 0:
        bad('"ts" must be a non-negative number')
    etype = record.get("type")
    if etype not in EVENT_TYPES:
        bad('"type" must be one of ' + ", ".join(EVENT_TYPES))
    tool = record.get("tool")
    if not isinstance(tool, str):
        bad('"tool" must be a string')
    agent = record.get("agent", "")
    if not isinstance(agent, str):
        bad('"agent" must be a string')
    args = record.get("args", {})
    if not isinstance(args, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in args.items()
    ):
        bad('"args" must map strings to strings')
    extra = {k: v for k, v in record.items() if k not in _CORE_KEYS}
    return Event(seq=seq, ts=ts, etype=etype, tool=tool, agent=agent, args=args, extra=extra)


def encode_event(event: Event) -> str:
    """Inverse of decode_event_line (decode(encode(e)) == e)."""
    record = {
        "seq": event.seq,
        "ts": event.ts,
        "type": event.etype,
        "tool": event.tool,
        "agent": event.agent,
        "args": dict(event.args),
    }
    for key in sorted(event.extra):
        record[key] = event.extra[key]
    return json.dumps(record, sort_keys=False, separators=(",", ":"))


def sampling_filter(event: Event, spec) -> bool:
    """True when the event advances the sampling clock for this spec."""
    body = spec.sampling if spec.sampling is not None else DEFAULT_SAMPLING
    return eval_body(body, event)


def read_event_stream(source, strict: bool = True, on_error=None):
    """Yield events from a JSONL file path, '-' for stdin, or a file object.

    Blank lines are skipped.  Malformed lines raise in strict mode; in
    lenient mode they are dropped (on_error, when given, sees each drop).
    """
    if hasattr(source, "read"):
        yield from _read_lines(source, strict, on_error)
        return
    if source == "-":
        yield from _read_lines(sys.stdin, strict, on_error)
        return
    with open(source, "r", encoding="utf-8") as handle:
        yield from _read_lines(handle, strict, on_error)


def _read_lines(handle, strict, on_error):
    for lineno, raw in enumerate(handle, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            yield decode_event_line(line, lineno)
        except IngestError as exc:
            if strict:
                raise
            if on_error is not None:
                on_error(exc)


def parse_endpoint(endpoint: str) -> tuple[str, int]:
    """Parse 'tcp:host:port' (or 'host:port') into (host, port)."""
    text = endpoint
    if text.startswith("tcp:"):
        text = text[4:]
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"bad endpoint {endpoint!r}; expected tcp:host:port")
    return host or "127.0.0.1", int(port)


def serve_live(endpoint: str, strict: bool = True, on_error=None, ready=None):
    """Accept one producer connection and yield its events in arrival order.

    The socket is read on a separate thread; events cross to the consumer
    through an ordered queue, preserving arrival order.  The stream ends
    when the producer closes the connection.  `ready`, when given, is
    called with the bound (host, port) before accepting.
    """
    host, port = parse_endpoint(endpoint)
    server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        server.bind((host, port))
        server.listen(1)
        if ready is not None:
            ready(server.getsockname())
        conn, _addr = server.accept()
    except BaseException:
        server.close()
        raise
    server.close()

    handoff: queue.Queue = queue.Queue()
    _DONE = object()

    with conn:
        reader = conn.makefile("r", encoding="utf-8", errors="replace", newline="\n")
        greeting = reader.readline().strip()
        if greeting != HANDSHAKE:
            conn.sendall(b"ERR version\n")
            raise ProtocolError(f"bad handshake {greeting!r}; expected {HANDSHAKE}")
        conn.sendall(b"OK\n")

        def pump():
            lineno = 0
            try:
                for raw in reader:
                    lineno += 1
                    line = raw.strip()
                    if not line:
                        continue
                    try:
                        handoff.put(decode_event_line(line, lineno))
                    except IngestError as exc:
                        try:
                            conn.sendall(f"ERR line {lineno}\n".encode())
                        except OSError:
                            pass
                        if strict:
                            handoff.put(exc)
                            return
                        if on_error is not None:
                            on_error(exc)
                handoff.put(_DONE)
            except OSError as exc:
                handoff.put(ProtocolError(f"connection error: {exc}"))

        thread = threading.Thread(target=pump, name="oroboro-ingest", daemon=True)
        thread.start()
        try:
            while True:
                item = handoff.get()
                if item is _DONE:
                    break
                if isinstance(item, Exception):
                    raise item
                yield item
        finally:
            thread.join(timeout=5)

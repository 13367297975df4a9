"""Structured observations from the monitored system.

An Event is one hook firing (tool call about to run, tool call finished,
or a custom signal).  Sampling turns a subset of the event stream into
the logical clock that temporal expressions are evaluated against.
"""

from __future__ import annotations

from dataclasses import dataclass, field

EVENT_TYPES = ("tool_call_pre", "tool_call_post", "custom")


@dataclass(frozen=True)
class Event:
    """One observation on the wire.

    seq is assigned by the producer and must strictly increase within a
    stream.  ts is a timestamp in arbitrary units.  args holds flattened
    tool arguments; extra preserves unknown wire keys (ignored by
    predicates).
    """

    seq: int
    ts: float
    etype: str
    tool: str = ""
    agent: str = ""
    args: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.seq < 1:
            raise ValueError("event seq must be a positive integer")
        if self.ts < 0:
            raise ValueError("event ts must be non-negative")
        if self.etype not in EVENT_TYPES:
            raise ValueError(f"unknown event type {self.etype!r}")


@dataclass
class SamplingClock:
    """Counts sampled events.  The first sampled event has index 1."""

    count: int = 0
    last_ts: float = 0.0

    def tick(self, ts: float) -> int:
        self.count += 1
        self.last_ts = ts
        return self.count

"""Temporal-assertion monitoring for event-emitting systems.

Declare predicates over structured events and temporal assertions over
those predicates; the monitor evaluates assertions incrementally as
events arrive and reports hierarchical match/failure traces.
"""

from .dsl import SpecFile, dump_ast, format_spec, parse_spec
from .engine.events import Event, SamplingClock
from .engine.exprs import (
    Alt,
    AssertionSpec,
    Concat,
    Cond,
    Conj,
    Fuse,
    Pred,
    Repeat,
    format_expr,
    max_len,
    min_len,
)
from .engine.monitor import Monitor, monitor_finish, monitor_init, monitor_step
from .engine.offline import offline_matches, verdict_offline
from .engine.predicates import PredicateDef, eval_predicate
from .engine.semantics import Span
from .engine.traces import (
    FAILURE,
    INCOMPLETE,
    MATCH,
    VACUOUS,
    TraceNode,
    Verdict,
    render_trace,
    verdict_to_json,
)
from .errors import (
    ConfigError,
    IngestError,
    ParseError,
    ProtocolError,
    SpecError,
    StreamOrderError,
)
from .ingest import decode_event_line, encode_event, read_event_stream, sampling_filter, serve_live
from .scenario import Scenario, demo_spec_path, generate_run, scenario

__version__ = "0.1.0"

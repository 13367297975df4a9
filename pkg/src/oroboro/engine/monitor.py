"""Online incremental monitor.

Each assertion spawns attempts anchored at sampling indices; every live
attempt advances one small state machine per event, with no lookahead.
A verdict is emitted at the earliest sampling index at which it is
determined, and must agree with the offline oracle on the full stream.
"""

from __future__ import annotations

from ..errors import ConfigError, StreamOrderError
from .events import SamplingClock
from .exprs import Alt, Concat, Cond, Conj, Fuse, Pred, Repeat, walk
from .predicates import Compare, FieldRef, StrLit, eval_body
from .semantics import EvalContext, Explorer
from .traces import FAILURE, INCOMPLETE, MATCH, VACUOUS, TraceBuilder, Verdict

DEFAULT_SAMPLING = Compare("==", FieldRef("etype"), StrLit("tool_call_pre"))


# --- expression step machines -------------------------------------------------
#
# A machine consumes one sampled event per step and reports whether the
# expression matched a span ending exactly at that index.  alive means the
# machine could still match given more events.


class _PredM:
    __slots__ = ("name", "alive")

    def __init__(self, name):
        self.name = name
        self.alive = True

    def step(self, idx, values):
        self.alive = False
        return values[self.name]


class _ChainM:
    """Concatenation, and fusion when overlap is set."""

    __slots__ = ("a", "b_expr", "overlap", "bs", "spawn", "alive")

    def __init__(self, a_expr, b_expr, overlap):
        self.a = _compile(a_expr)
        self.b_expr = b_expr
        self.overlap = overlap
        self.bs = []
        self.spawn = False
        self.alive = True

    def step(self, idx, values):
        matched = False
        if self.spawn:
            self.bs.append(_compile(self.b_expr))
            self.spawn = False
        for b in self.bs:
            if b.step(idx, values):
                matched = True
        self.bs = [b for b in self.bs if b.alive]
        if self.a.alive and self.a.step(idx, values):
            if self.overlap:
                nb = _compile(self.b_expr)
                if nb.step(idx, values):
                    matched = True
                if nb.alive:
                    self.bs.append(nb)
            else:
                self.spawn = True
        self.alive = self.a.alive or self.spawn or bool(self.bs)
        return matched


class _AltM:
    __slots__ = ("a", "b", "alive")

    def __init__(self, a_expr, b_expr):
        self.a = _compile(a_expr)
        self.b = _compile(b_expr)
        self.alive = True

    def step(self, idx, values):
        matched = False
        if self.a.alive and self.a.step(idx, values):
            matched = True
        if self.b.alive and self.b.step(idx, values):
            matched = True
        self.alive = self.a.alive or self.b.alive
        return matched


class _ConjM:
    __slots__ = ("a", "b", "alive")

    def __init__(self, a_expr, b_expr):
        self.a = _compile(a_expr)
        self.b = _compile(b_expr)
        self.alive = True

    def step(self, idx, values):
        ma = self.a.step(idx, values)
        mb = self.b.step(idx, values)
        self.alive = self.a.alive and self.b.alive
        return ma and mb


class _RepM:
    __slots__ = ("item", "lo", "hi", "states", "pending", "alive")

    def __init__(self, item, lo, hi):
        self.item = item
        self.lo = lo
        self.hi = hi
        # (machine, set of repetition ordinals this machine is serving)
        self.states = [(_compile(item), {1})]
        self.pending = set()
        self.alive = True

    def step(self, idx, values):
        if self.pending:
            self.states.append((_compile(self.item), set(self.pending)))
            self.pending = set()
        matched = False
        for machine, counts in self.states:
            if machine.alive and machine.step(idx, values):
                if any(c >= self.lo for c in counts):
                    matched = True
                self.pending |= {c + 1 for c in counts if c < self.hi}
        self.states = [(m, c) for m, c in self.states if m.alive]
        self.alive = bool(self.states) or bool(self.pending)
        return matched


def _compile(expr):
    if isinstance(expr, Pred):
        return _PredM(expr.name)
    if isinstance(expr, Concat):
        return _ChainM(expr.a, expr.b, overlap=False)
    if isinstance(expr, Fuse):
        return _ChainM(expr.a, expr.b, overlap=True)
    if isinstance(expr, Alt):
        return _AltM(expr.a, expr.b)
    if isinstance(expr, Conj):
        return _ConjM(expr.a, expr.b)
    if isinstance(expr, Repeat):
        return _RepM(expr.item, expr.lo, expr.hi)
    raise TypeError(f"not a matchable expression node: {expr!r}")


# --- attempts -------------------------------------------------------------------


class _Obligation:
    __slots__ = ("ante_end", "start", "machine", "witness_end", "failed_at")

    def __init__(self, ante_end):
        self.ante_end = ante_end
        self.start = ante_end + 1
        self.machine = None
        self.witness_end = None
        self.failed_at = None

    @property
    def open(self):
        return self.witness_end is None and self.failed_at is None


class _Attempt:
    def __init__(self, assertion, start):
        self.assertion = assertion
        self.start = start
        body = assertion.body
        self.cond = isinstance(body, Cond)
        if self.cond:
            self.ante = _compile(body.a)
            self.ante_ends = []
            self.obligations = []
        else:
            self.machine = _compile(body)

    def step(self, idx, values):
        """Returns (kind, data) when the attempt resolves at idx, else None."""
        if not self.cond:
            matched = self.machine.step(idx, values)
            if matched:
                return (MATCH, idx)
            if not self.machine.alive:
                return (FAILURE, idx)
            return None

        for ob in self.obligations:
            if ob.machine is None and ob.start == idx:
                ob.machine = _compile(self.assertion.body.b)
            if ob.machine is not None and ob.open:
                if ob.machine.step(idx, values):
                    ob.witness_end = idx
                elif not ob.machine.alive:
                    ob.failed_at = idx
        newly_failed = [ob for ob in self.obligations if ob.failed_at == idx]
        if newly_failed:
            decisive = min(newly_failed, key=lambda ob: ob.ante_end)
            return (FAILURE, decisive)

        if self.ante.alive and self.ante.step(idx, values):
            self.ante_ends.append(idx)
            self.obligations.append(_Obligation(idx))

        if not self.ante.alive and all(ob.witness_end is not None for ob in self.obligations):
            if not self.ante_ends:
                return (VACUOUS, idx)
            return (MATCH, idx)
        return None

    def pending_obligations(self):
        return [ob for ob in self.obligations if ob.open]


class Monitor:
    """Single-threaded online monitor over one event stream.

    Calls to step must be externally serialized in event order; distinct
    Monitor instances are independent.
    """

    def __init__(self, spec, *, eot="strong", report_vacuous=None, skip_disorder=False):
        if eot not in ("strong", "weak"):
            raise ValueError(f"unknown end-of-trace policy {eot!r}")
        known = {p.name for p in spec.predicates}
        for assertion in spec.assertions:
            for node in walk(assertion.body):
                if isinstance(node, Pred) and node.name not in known:
                    raise ConfigError(
                        f"unknown predicate {node.name!r} in assertion {assertion.name!r}"
                    )
                if isinstance(node, Cond) and node is not assertion.body:
                    raise ConfigError(
                        f"conditional must be outermost in assertion {assertion.name!r}"
                    )
        self.spec = spec
        self.eot = eot
        self.report_vacuous = report_vacuous
        self.skip_disorder = skip_disorder
        self.sampling_body = spec.sampling if spec.sampling is not None else DEFAULT_SAMPLING
        self.ctx = EvalContext(spec.predicates)
        self.clock = SamplingClock()
        self.attempts = []
        self.last_seq = None
        self.finished = False
        self.dropped = 0

    # verdict suppression shares one rule with the offline oracle
    def _emit(self, verdict, assertion):
        if verdict.kind != VACUOUS:
            return True
        if self.report_vacuous is None:
            return assertion.report_vacuous
        return self.report_vacuous

    def step(self, event):
        """Consume one event; returns verdicts resolved at this index."""
        if self.finished:
            raise RuntimeError("monitor already finished")
        if self.last_seq is not None and event.seq <= self.last_seq:
            if self.skip_disorder:
                self.dropped += 1
                return []
            raise StreamOrderError(
                f"event seq {event.seq} after {self.last_seq}: stream is out of order"
            )
        self.last_seq = event.seq

        if not eval_body(self.sampling_body, event):
            return []

        idx = self.clock.tick(event.ts)
        self.ctx.append(idx, event)
        values = self.ctx.values[idx]

        for assertion in self.spec.assertions:
            if assertion.mode == "always" or idx == 1:
                self.attempts.append(_Attempt(assertion, idx))

        out = []
        still_live = []
        builder = None
        for attempt in self.attempts:
            resolution = attempt.step(idx, values)
            if resolution is None:
                still_live.append(attempt)
                continue
            if builder is None:
                builder = TraceBuilder(Explorer(self.ctx))
            verdict = self._build_verdict(attempt, resolution, builder, idx)
            if self._emit(verdict, attempt.assertion):
                out.append(verdict)
        self.attempts = still_live
        return out

    def finish(self, eot=None):
        """End of stream: resolve every pending attempt per the eot policy."""
        if self.finished:
            return []
        self.finished = True
        policy = self.eot if eot is None else eot
        if policy not in ("strong", "weak"):
            raise ValueError(f"unknown end-of-trace policy {policy!r}")
        length = self.ctx.length
        out = []
        builder = None
        for attempt in self.attempts:
            if builder is None:
                builder = TraceBuilder(Explorer(self.ctx))
            verdict = self._finish_verdict(attempt, builder, length, policy)
            if self._emit(verdict, attempt.assertion):
                out.append(verdict)
        self.attempts = []
        return out

    # --- verdict construction ----------------------------------------------

    def _build_verdict(self, attempt, resolution, builder, idx):
        kind, data = resolution
        name = attempt.assertion.name
        body = attempt.assertion.body
        t = attempt.start
        length = self.ctx.length

        if not attempt.cond:
            if kind == MATCH:
                trace = builder.witness(body, t, idx)
                return Verdict(name, MATCH, trace, t, idx, resolved_at=idx)
            trace = builder.attempt_tree(body, t, length + 1, probe=True)
            return Verdict(name, FAILURE, trace, t, trace.end, resolved_at=idx)

        if kind == FAILURE:
            ob = data
            sub = builder.attempt_tree(body.b, ob.ante_end + 1, length + 1, probe=True)
            kids = [builder.collapsed(body.a, t, ob.ante_end), sub]
            trace = builder.make_node(">>", t, sub.end, 0, kids)
            return Verdict(name, FAILURE, trace, t, sub.end, resolved_at=idx)
        if kind == VACUOUS:
            trace = builder.make_node(">>", t, t, 1, [])
            return Verdict(name, VACUOUS, trace, t, t, resolved_at=idx)
        # conditional match: witness = shortest antecedent match plus the
        # shortest consequent witness it obligated
        ante_end = attempt.ante_ends[0]
        witness_end = min(
            ob.witness_end for ob in attempt.obligations if ob.ante_end == ante_end
        )
        kids = [
            builder.witness(body.a, t, ante_end),
            builder.witness(body.b, ante_end + 1, witness_end),
        ]
        trace = builder.make_node(">>", t, witness_end, 1, kids)
        return Verdict(name, MATCH, trace, t, witness_end, resolved_at=idx)

    def _finish_verdict(self, attempt, builder, length, policy):
        name = attempt.assertion.name
        body = attempt.assertion.body
        t = attempt.start

        if not attempt.cond:
            if policy == "strong":
                trace = builder.attempt_tree(body, t, length + 1, probe=True)
                return Verdict(name, FAILURE, trace, t, trace.end, resolved_at=length + 1)
            trace = builder.attempt_tree(body, t, length, probe=False)
            return Verdict(name, INCOMPLETE, trace, t, trace.end, resolved_at=length + 1)

        pending = attempt.pending_obligations()
        if not pending:
            if not attempt.ante_ends:
                trace = builder.make_node(">>", t, t, 1, [])
                return Verdict(name, VACUOUS, trace, t, t, resolved_at=length + 1)
            ante_end = attempt.ante_ends[0]
            witness_end = min(
                ob.witness_end for ob in attempt.obligations if ob.ante_end == ante_end
            )
            kids = [
                builder.witness(body.a, t, ante_end),
                builder.witness(body.b, ante_end + 1, witness_end),
            ]
            trace = builder.make_node(">>", t, witness_end, 1, kids)
            return Verdict(name, MATCH, trace, t, witness_end, resolved_at=length + 1)

        decisive = min(pending, key=lambda ob: ob.ante_end)
        if policy == "strong":
            sub = builder.attempt_tree(body.b, decisive.ante_end + 1, length + 1, probe=True)
            kids = [builder.collapsed(body.a, t, decisive.ante_end), sub]
            trace = builder.make_node(">>", t, sub.end, 0, kids)
            return Verdict(name, FAILURE, trace, t, sub.end, resolved_at=length + 1)
        sub = builder.attempt_tree(body.b, decisive.ante_end + 1, length, probe=False)
        kids = [builder.collapsed(body.a, t, decisive.ante_end)]
        if sub is not None:
            kids.append(sub)
        trace = builder.make_node(">>", t, length, 0, kids)
        return Verdict(name, INCOMPLETE, trace, t, length, resolved_at=length + 1)


def monitor_init(spec, **kwargs) -> Monitor:
    return Monitor(spec, **kwargs)


def monitor_step(state: Monitor, event):
    return state.step(event)


def monitor_finish(state: Monitor, eot=None):
    return state.finish(eot)

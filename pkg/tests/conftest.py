"""Shared fixtures and the independent brute-force oracle."""

from __future__ import annotations

import pytest

from oroboro.engine.events import Event
from oroboro.engine.exprs import Alt, Concat, Conj, Fuse, Pred, Repeat
from oroboro.engine.predicates import ArgRef, Compare, PredicateDef, StrLit

BIT_PREDS = ("p", "q", "r")


def arg_pred(name: str) -> PredicateDef:
    """Predicate true when the event carries args[name] == "1"."""
    return PredicateDef(name, Compare("==", ArgRef(name), StrLit("1")))


def make_event(seq, *, ts=None, etype="tool_call_pre", tool="t", agent="", args=None, extra=None):
    return Event(
        seq=seq,
        ts=10 * seq if ts is None else ts,
        etype=etype,
        tool=tool,
        agent=agent,
        args=args or {},
        extra=extra or {},
    )


def bit_events(bits, names=BIT_PREDS):
    """One event per row of bits; bits may be a flat list (single 'bit' arg)
    or a list of tuples aligned with names."""
    events = []
    for i, row in enumerate(bits, start=1):
        if isinstance(row, (tuple, list)):
            args = {name: str(int(b)) for name, b in zip(names, row)}
        else:
            args = {"bit": str(int(row))}
        events.append(make_event(i, args=args))
    return events


def truth_table(predicates, events):
    """1-based truth vectors per predicate name, for the brute oracle."""
    from oroboro.engine.predicates import eval_predicate

    return {
        p.name: [None] + [eval_predicate(p, ev) for ev in events] for p in predicates
    }


# --- independent oracle: enumerate every span decomposition --------------------


def span_matches(expr, truth, s, e) -> bool:
    """Whether expr matches exactly [s, e], by exhaustive decomposition."""
    if isinstance(expr, Pred):
        return s == e and truth[expr.name][s]
    if isinstance(expr, Concat):
        return any(
            span_matches(expr.a, truth, s, k) and span_matches(expr.b, truth, k + 1, e)
            for k in range(s, e)
        )
    if isinstance(expr, Fuse):
        return any(
            span_matches(expr.a, truth, s, k) and span_matches(expr.b, truth, k, e)
            for k in range(s, e + 1)
        )
    if isinstance(expr, Alt):
        return span_matches(expr.a, truth, s, e) or span_matches(expr.b, truth, s, e)
    if isinstance(expr, Conj):
        return span_matches(expr.a, truth, s, e) and span_matches(expr.b, truth, s, e)
    if isinstance(expr, Repeat):

        def rep(s2, k):
            if k == 1:
                return span_matches(expr.item, truth, s2, e)
            return any(
                span_matches(expr.item, truth, s2, m) and rep(m + 1, k - 1)
                for m in range(s2, e)
            )

        return any(rep(s, k) for k in range(expr.lo, expr.hi + 1))
    raise TypeError(f"unexpected node {expr!r}")


def brute_spans(expr, truth, length, start):
    return {(start, e) for e in range(start, length + 1) if span_matches(expr, truth, start, e)}


# --- the bit-vector scenario used throughout --------------------------------------

BITSTREAM = (0, 1, 1, 1, 0, 1, 0, 0)

BIT_SPEC_SRC = """
sampling on etype == "tool_call_pre";
pred a := arg("bit") == "1";
pred ok := true;
assert always te: (a + a) | (a + ok + a);
"""


@pytest.fixture
def bit_spec():
    from oroboro.dsl import parse_spec

    return parse_spec(BIT_SPEC_SRC)


@pytest.fixture
def bit_stream_events():
    return bit_events(BITSTREAM)


class MiniSpec:
    """Programmatic stand-in for a parsed SpecFile."""

    def __init__(self, assertions, predicates=None, sampling=None):
        self.predicates = [arg_pred(n) for n in BIT_PREDS] if predicates is None else predicates
        self.assertions = assertions
        self.sampling = sampling
        self.named_exprs = {}


# --- randomized case generation ------------------------------------------------


def rand_expr(rng, depth):
    from oroboro.engine.exprs import Alt, Concat, Conj, Fuse, Pred, Repeat

    if depth <= 0 or rng.random() < 0.35:
        return Pred(rng.choice(BIT_PREDS))
    kind = rng.choice(("cat", "alt", "conj", "fuse", "rep"))
    if kind == "rep":
        lo = rng.randint(1, 2)
        return Repeat(rand_expr(rng, depth - 1), lo, rng.randint(lo, 3))
    a, b = rand_expr(rng, depth - 1), rand_expr(rng, depth - 1)
    return {"cat": Concat, "alt": Alt, "conj": Conj, "fuse": Fuse}[kind](a, b)


def rand_events(rng, n):
    return bit_events([[rng.randint(0, 1) for _ in BIT_PREDS] for _ in range(n)])


def run_online(spec, events, **kwargs):
    from oroboro.engine.monitor import Monitor

    mon = Monitor(spec, **kwargs)
    verdicts = []
    for ev in events:
        verdicts += mon.step(ev)
    verdicts += mon.finish()
    return verdicts


def check_well_formed(node):
    """Child containment plus sequential-contiguity trace invariants."""
    for child in node.children:
        assert node.start <= child.start <= child.end <= node.end, (node, child)
        check_well_formed(child)
    if node.label in ("+", "*") and len(node.children) > 1:
        for left, right in zip(node.children, node.children[1:]):
            assert right.start == left.end + 1, (node.label, left, right)
    if node.label == "/" and len(node.children) == 2:
        assert node.children[1].start == node.children[0].end

"""Hierarchical match/failure traces and their text rendering.

A verdict carries a tree of TraceNodes decomposing the result into
sub-expression results, analogous to captures in a regex engine.  Match
traces show a single witness path, fully expanded.  Failure traces show
every alternation branch attempted; within a sequential composition the
decisive continuation (the one explored furthest) is shown, and matched
sub-expressions collapse to a single status-1 line.  Indices probed past
the end of the stream render as status-0 leaves.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .exprs import Alt, Concat, Conj, Fuse, Pred, Repeat, glyph
from .semantics import EvalContext, Explorer

MATCH = "MATCH"
FAILURE = "FAILURE"
VACUOUS = "VACUOUS"
INCOMPLETE = "INCOMPLETE"


@dataclass(frozen=True)
class TraceNode:
    label: str
    start: int
    end: int
    ts_start: float
    ts_end: float
    status: int
    captures: dict = field(default_factory=dict)
    children: tuple = ()


@dataclass(frozen=True)
class Verdict:
    assertion: str
    kind: str
    trace: TraceNode
    start: int
    end: int
    # sampling index at which the verdict became determined; one past the
    # window for verdicts settled at end of stream
    resolved_at: int


class TraceBuilder:
    """Builds trace trees from a context window plus its Explorer."""

    def __init__(self, explorer: Explorer):
        self.ex = explorer
        self.ctx: EvalContext = explorer.ctx
        self._exact_memo: dict[tuple, tuple[int, ...]] = {}

    # --- shared node helpers -------------------------------------------------

    def _node(self, label, start, end, status, captures=None, children=()):
        return TraceNode(
            label=label,
            start=start,
            end=end,
            ts_start=self.ctx.ts(start),
            ts_end=self.ctx.ts(end),
            status=status,
            captures=dict(captures or {}),
            children=tuple(children),
        )

    def make_node(self, label, start, end, status, children) -> TraceNode:
        """Public node constructor for verdict roots."""
        return self._node(label, start, end, status, children=children)

    def _leaf(self, pred: Pred, index: int, status: int) -> TraceNode:
        captures = {}
        if pred.capture is not None and status == 1:
            ev = self.ctx.events[index]
            captures = {f"{pred.capture}.tool": ev.tool, f"{pred.capture}.seq": str(ev.seq)}
        return self._node(pred.name, index, index, status, captures)

    def collapsed(self, expr, start: int, end: int) -> TraceNode:
        """One status-1 line for a matched sub-expression, no children."""
        if isinstance(expr, Pred):
            return self._leaf(expr, start, 1)
        return self._node(glyph(expr), start, end, 1)

    # --- witness (match) trees -----------------------------------------------

    def witness(self, expr, start: int, end: int) -> TraceNode:
        """Fully expanded witness for a match of expr over exactly [start, end]."""
        if isinstance(expr, Pred):
            return self._leaf(expr, start, 1)
        if isinstance(expr, Alt):
            arm = expr.a if end in self.ex.matches(expr.a, start) else expr.b
            return self._node("|", start, end, 1, children=[self.witness(arm, start, end)])
        if isinstance(expr, Conj):
            kids = [self.witness(expr.a, start, end), self.witness(expr.b, start, end)]
            return self._node("&", start, end, 1, children=kids)
        if isinstance(expr, Concat):
            split = self._split(expr.a, expr.b, start, end, overlap=False)
            kids = [self.witness(expr.a, start, split), self.witness(expr.b, split + 1, end)]
            return self._node("+", start, end, 1, children=kids)
        if isinstance(expr, Fuse):
            split = self._split(expr.a, expr.b, start, end, overlap=True)
            kids = [self.witness(expr.a, start, split), self.witness(expr.b, split, end)]
            return self._node("/", start, end, 1, children=kids)
        if isinstance(expr, Repeat):
            chunks = self._repeat_chunks(expr, start, end)
            kids = []
            s = start
            for e in chunks:
                kids.append(self.witness(expr.item, s, e))
                s = e + 1
            return self._node("*", start, end, 1, children=kids)
        raise TypeError(f"not a matchable expression node: {expr!r}")

    def _split(self, a, b, start, end, overlap: bool) -> int:
        for e in self.ex.matches(a, start):
            rest = e if overlap else e + 1
            if rest <= end and end in self.ex.matches(b, rest):
                return e
        raise AssertionError("no witness split found for a claimed match")

    def _exact_ends(self, item, start: int, count: int) -> tuple[int, ...]:
        """Ends of exactly-count-fold repetitions of item from start."""
        key = (id(item), start, count)
        hit = self._exact_memo.get(key)
        if hit is not None:
            return hit
        if count == 1:
            result = self.ex.matches(item, start)
        else:
            ends: set[int] = set()
            for e in self.ex.matches(item, start):
                ends.update(self._exact_ends(item, e + 1, count - 1))
            result = tuple(sorted(ends))
        self._exact_memo[key] = result
        return result

    def _repeat_chunks(self, expr: Repeat, start: int, end: int) -> list[int]:
        """Chunk end indices for the canonical (fewest, shortest-first) witness."""
        for count in range(expr.lo, expr.hi + 1):
            if end in self._exact_ends(expr.item, start, count):
                break
        else:
            raise AssertionError("no repetition count fits a claimed match")
        chunks = []
        s = start
        for remaining in range(count, 0, -1):
            if remaining == 1:
                chunks.append(end)
                break
            for e in self.ex.matches(expr.item, s):
                if end in self._exact_ends(expr.item, e + 1, remaining - 1):
                    chunks.append(e)
                    s = e + 1
                    break
            else:
                raise AssertionError("repetition witness decomposition failed")
        return chunks

    # --- failure / incomplete trees -------------------------------------------

    def attempt_tree(self, expr, start: int, horizon: int, probe: bool):
        """Tree of the branches explored before giving up.

        horizon is the largest index the evaluation was stepped to.  With
        probe set, indices past the window (but within the horizon) render
        as absent status-0 leaves.  Returns None when nothing was examined.
        """
        length = self.ctx.length
        window = min(horizon, length)
        if start > horizon:
            return None
        if start > length:
            # past the end of the stream: only reachable when probing
            if not probe:
                return None
            return self._absent(expr, start)

        if isinstance(expr, Pred):
            return self._leaf(expr, start, int(self.ctx.truth(expr.name, start)))

        if isinstance(expr, Alt):
            kids = [
                self.attempt_tree(expr.a, start, horizon, probe),
                self.attempt_tree(expr.b, start, horizon, probe),
            ]
            kids = [k for k in kids if k is not None]
            return self._node("|", start, self._extent(expr, start, horizon), 0, children=kids)

        if isinstance(expr, Conj):
            inner = self._extent(expr, start, horizon)
            kids = []
            for side in (expr.a, expr.b):
                ends = [e for e in self.ex.matches(side, start) if e <= inner]
                if ends:
                    kids.append(self.collapsed(side, start, min(ends)))
                else:
                    sub = self.attempt_tree(side, start, inner, probe)
                    if sub is not None:
                        kids.append(sub)
            return self._node("&", start, inner, 0, children=kids)

        if isinstance(expr, (Concat, Fuse)):
            overlap = isinstance(expr, Fuse)
            label = "/" if overlap else "+"
            a_ends = [e for e in self.ex.matches(expr.a, start) if e <= window]
            if not a_ends:
                kids = [self.attempt_tree(expr.a, start, horizon, probe)]
                kids = [k for k in kids if k is not None]
                return self._node(label, start, self._extent(expr, start, horizon), 0, children=kids)
            best = None
            for e in a_ends:
                rest = e if overlap else e + 1
                sub = self.attempt_tree(expr.b, rest, horizon, probe)
                if sub is not None and (best is None or (sub.end, e) > (best[1].end, best[0])):
                    best = (e, sub)
            if best is None:
                # continuations all pending past the horizon
                kids = [self.collapsed(expr.a, start, max(a_ends))]
            else:
                kids = [self.collapsed(expr.a, start, best[0]), best[1]]
            return self._node(label, start, self._extent(expr, start, horizon), 0, children=kids)

        if isinstance(expr, Repeat):
            kids, _ = self._repeat_attempt(expr.item, start, expr.lo, expr.hi, horizon, probe)
            return self._node("*", start, self._extent(expr, start, horizon), 0, children=kids)

        raise TypeError(f"not a matchable expression node: {expr!r}")

    def _repeat_attempt(self, item, start, lo, hi, horizon, probe):
        """Chunk chain for a failing repetition: matched chunks collapsed,
        then the decisive failing continuation."""
        length = self.ctx.length
        if start > length:
            sub = self.attempt_tree(item, start, horizon, probe)
            return ([sub] if sub is not None else [], start if sub is not None else start - 1)
        ends = [e for e in self.ex.matches(item, start) if e <= min(horizon, length)]
        if not ends or hi == 1:
            sub = self.attempt_tree(item, start, horizon, probe)
            kids = [sub] if sub is not None else []
            ext = sub.end if sub is not None else start - 1
            return (kids, ext)
        best_kids, best = None, None
        for e in ends:
            tail_kids, tail_ext = self._repeat_attempt(
                item, e + 1, max(lo - 1, 1), hi - 1, horizon, probe
            )
            if best is None or (tail_ext, e) > best:
                best = (tail_ext, e)
                best_kids = [self.collapsed(item, start, e)] + tail_kids
        return (best_kids, best[0])

    def _absent(self, expr, start: int) -> TraceNode:
        """Status-0 rendering of the next obligation at an index past the
        stream: composites reduce to their first-position shape."""
        if isinstance(expr, Pred):
            return self._node(expr.name, start, start, 0)
        if isinstance(expr, (Alt, Conj)):
            kids = [self._absent(expr.a, start), self._absent(expr.b, start)]
            return self._node(glyph(expr), start, start, 0, children=kids)
        if isinstance(expr, (Concat, Fuse)):
            return self._node(glyph(expr), start, start, 0, children=[self._absent(expr.a, start)])
        if isinstance(expr, Repeat):
            return self._node("*", start, start, 0, children=[self._absent(expr.item, start)])
        raise TypeError(f"not a matchable expression node: {expr!r}")

    def _extent(self, expr, start: int, horizon: int) -> int:
        """Largest index this exploration examined, capped by the horizon."""
        r = self.ex.run(expr, start)
        if r.death is not None and r.death <= horizon:
            return r.death
        return horizon


# --- rendering ----------------------------------------------------------------


def _fmt_ts(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else str(x)


def _fmt_captures(captures: dict) -> str:
    return ", ".join(f"{k}={captures[k]}" for k in sorted(captures))


def render_trace(verdict: Verdict) -> str:
    """Deterministic text block: kind + assertion, then the trace pre-order."""
    lines = [f"{verdict.kind} {verdict.assertion}"]

    def emit(node: TraceNode, depth: int) -> None:
        lines.append(
            "  " * depth
            + f"{node.label} ({node.start}/{node.end})"
            + f" ({_fmt_ts(node.ts_start)}/{_fmt_ts(node.ts_end)})"
            + f" {node.status} {{{_fmt_captures(node.captures)}}}"
        )
        for child in node.children:
            emit(child, depth + 1)

    emit(verdict.trace, 0)
    return "\n".join(lines)


def trace_to_json(node: TraceNode) -> dict:
    return {
        "label": node.label,
        "span": [node.start, node.end],
        "ts_span": [node.ts_start, node.ts_end],
        "status": node.status,
        "captures": dict(node.captures),
        "children": [trace_to_json(c) for c in node.children],
    }


def verdict_to_json(verdict: Verdict) -> dict:
    return {
        "assertion": verdict.assertion,
        "kind": verdict.kind,
        "start": verdict.start,
        "end": verdict.end,
        "trace": trace_to_json(verdict.trace),
    }

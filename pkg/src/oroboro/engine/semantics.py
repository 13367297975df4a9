"""Denotational evaluation of temporal expressions over a sampled window.

The Explorer computes, for an expression anchored at a start index, the
set of indices where complete matches end, whether the evaluation could
still be extended past the end of the window, and the index at which an
incremental evaluation gives up.  These three facts drive verdicts,
failure spans, and trace construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .events import Event
from .exprs import Alt, Concat, Conj, Fuse, Pred, Repeat
from .predicates import PredicateDef, eval_predicate


@dataclass(frozen=True)
class Span:
    """Closed interval of sampling indices an expression matched."""

    start: int
    end: int
    vacuous: bool = False

    def __post_init__(self):
        if self.start < 1 or self.end < self.start:
            raise ValueError(f"invalid span ({self.start}, {self.end})")


class EvalContext:
    """The sampled window: events by index (1-based) plus predicate values.

    Every declared predicate is evaluated exactly once per sampled event;
    all downstream evaluation consults the cached truth vector.
    """

    def __init__(self, predicates: list[PredicateDef]):
        self.predicates = list(predicates)
        self.events: dict[int, Event] = {}
        self.values: dict[int, dict[str, bool]] = {}
        self.length = 0

    def append(self, index: int, event: Event) -> None:
        if index != self.length + 1:
            raise ValueError("sampling indices must be appended contiguously")
        self.events[index] = event
        self.values[index] = {p.name: eval_predicate(p, event) for p in self.predicates}
        self.length = index

    def truth(self, name: str, index: int) -> bool:
        return self.values[index][name]

    def ts(self, index: int) -> float:
        """Timestamp of a sampling index; indices past the window take the
        end-of-stream timestamp."""
        if index in self.events:
            return self.events[index].ts
        if self.length:
            return self.events[self.length].ts
        return 0.0


def build_context(predicates: list[PredicateDef], events: list[Event]) -> EvalContext:
    ctx = EvalContext(predicates)
    for i, ev in enumerate(events, start=1):
        ctx.append(i, ev)
    return ctx


class Exploration(NamedTuple):
    """Result of exploring one expression from one start index.

    ends:  sorted tuple of match end indices (within the window).
    alive: True when more events could still extend the evaluation.
    death: index at which an incremental evaluation runs out of ways to
           continue; None while alive through the end of the window.
    """

    ends: tuple[int, ...]
    alive: bool
    death: int | None


def _max_death(parts: list[int | None]) -> int | None:
    # None means "survives the window"; any such part keeps the whole alive
    if any(d is None for d in parts):
        return None
    return max(parts)


class Explorer:
    """Memoized recursive evaluation over a fixed context window."""

    def __init__(self, ctx: EvalContext):
        self.ctx = ctx
        self._memo: dict[tuple, Exploration] = {}

    def run(self, expr, start: int) -> Exploration:
        return self._run(expr, start)

    def matches(self, expr, start: int) -> tuple[int, ...]:
        return self._run(expr, start).ends

    def spans(self, expr, start: int) -> set[Span]:
        return {Span(start, e) for e in self._run(expr, start).ends}

    def _run(self, expr, start: int) -> Exploration:
        key = (id(expr), start)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        result = self._eval(expr, start)
        self._memo[key] = result
        return result

    def _eval(self, expr, start: int) -> Exploration:
        if start > self.ctx.length:
            # anchored past the window: nothing matched, everything pending
            return Exploration((), True, None)

        if isinstance(expr, Pred):
            matched = self.ctx.truth(expr.name, start)
            return Exploration((start,) if matched else (), False, start)

        if isinstance(expr, Concat):
            return self._chain(expr.a, expr.b, start, overlap=False)

        if isinstance(expr, Fuse):
            return self._chain(expr.a, expr.b, start, overlap=True)

        if isinstance(expr, Alt):
            ra = self._run(expr.a, start)
            rb = self._run(expr.b, start)
            ends = tuple(sorted(set(ra.ends) | set(rb.ends)))
            death = _max_death([ra.death, rb.death])
            return Exploration(ends, death is None, death)

        if isinstance(expr, Conj):
            ra = self._run(expr.a, start)
            rb = self._run(expr.b, start)
            ends = tuple(sorted(set(ra.ends) & set(rb.ends)))
            # the conjunction stops the moment either side stops
            if ra.death is None and rb.death is None:
                death = None
            elif ra.death is None:
                death = rb.death
            elif rb.death is None:
                death = ra.death
            else:
                death = min(ra.death, rb.death)
            return Exploration(ends, death is None, death)

        if isinstance(expr, Repeat):
            return self._repeat(expr.item, start, expr.lo, expr.hi)

        raise TypeError(f"not a matchable expression node: {expr!r}")

    def _chain(self, a, b, start: int, overlap: bool) -> Exploration:
        ra = self._run(a, start)
        ends: set[int] = set()
        deaths: list[int | None] = [ra.death]
        for e in ra.ends:
            rb = self._run(b, e if overlap else e + 1)
            ends.update(rb.ends)
            deaths.append(rb.death)
        death = _max_death(deaths)
        return Exploration(tuple(sorted(ends)), death is None, death)

    def _repeat(self, item, start: int, lo: int, hi: int) -> Exploration:
        key = (id(item), start, lo, hi, "*")
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if start > self.ctx.length:
            result = Exploration((), True, None)
            self._memo[key] = result
            return result
        ra = self._run(item, start)
        ends: set[int] = set()
        deaths: list[int | None] = [ra.death]
        for e in ra.ends:
            if lo <= 1:
                ends.add(e)
            if hi > 1:
                sub = self._repeat(item, e + 1, max(lo - 1, 1), hi - 1)
                ends.update(sub.ends)
                deaths.append(sub.death)
        death = _max_death(deaths)
        result = Exploration(tuple(sorted(ends)), death is None, death)
        self._memo[key] = result
        return result

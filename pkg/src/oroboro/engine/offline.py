"""Offline denotational oracle.

offline_matches is the set semantics of the operators; verdict_offline
replays a whole assertion over a finished trace.  The online monitor is
required to produce identical verdicts without lookahead; the test suite
holds the two implementations against each other.
"""

from __future__ import annotations

from .exprs import AssertionSpec, Cond, contains_cond
from .semantics import Explorer, Span, build_context
from .traces import FAILURE, INCOMPLETE, MATCH, VACUOUS, TraceBuilder, Verdict


def offline_matches(expr, events, start: int, predicates) -> set[Span]:
    """Denotational match set M(expr, start) over a sampled event list.

    events is the sampled window; predicates are the definitions the
    expression's leaves refer to.
    """
    if contains_cond(expr):
        raise ValueError("conditional expressions have no match-set semantics")
    if not (1 <= start <= len(events)):
        raise ValueError(f"start index {start} outside trace of length {len(events)}")
    ctx = build_context(predicates, events)
    return Explorer(ctx).spans(expr, start)


def verdict_offline(
    assertion: AssertionSpec,
    events,
    predicates,
    *,
    eot: str = "strong",
    report_vacuous: bool | None = None,
) -> list[Verdict]:
    """Replay one assertion over a finished sampled window.

    Verdicts are returned in resolution order (spawn order breaking ties),
    matching the online monitor's emission order.
    """
    if eot not in ("strong", "weak"):
        raise ValueError(f"unknown end-of-trace policy {eot!r}")
    inner = assertion.body.b if isinstance(assertion.body, Cond) else assertion.body
    if contains_cond(inner) or (
        isinstance(assertion.body, Cond) and contains_cond(assertion.body.a)
    ):
        raise ValueError("conditional must be outermost in an assertion body")
    ctx = build_context(predicates, events)
    explorer = Explorer(ctx)
    builder = TraceBuilder(explorer)
    length = ctx.length

    if assertion.mode == "always":
        spawns = range(1, length + 1)
    else:
        spawns = range(1, 2) if length >= 1 else range(0)

    want_vacuous = assertion.report_vacuous if report_vacuous is None else report_vacuous

    resolved = []
    for order, t in enumerate(spawns):
        verdict = _resolve(assertion, t, explorer, builder, length, eot)
        if verdict.kind == VACUOUS and not want_vacuous:
            continue
        resolved.append((verdict.resolved_at, order, verdict))
    resolved.sort(key=lambda item: (item[0], item[1]))
    return [v for _, _, v in resolved]


def _resolve(assertion, t, explorer, builder, length, eot) -> Verdict:
    body = assertion.body
    if isinstance(body, Cond):
        return _resolve_cond(assertion, body, t, explorer, builder, length, eot)
    return _resolve_plain(assertion, body, t, explorer, builder, length, eot)


def _resolve_plain(assertion, body, t, explorer, builder, length, eot) -> Verdict:
    r = explorer.run(body, t)
    if r.ends:
        end = min(r.ends)
        trace = builder.witness(body, t, end)
        return Verdict(assertion.name, MATCH, trace, t, end, resolved_at=end)
    if r.death is not None:
        trace = builder.attempt_tree(body, t, length + 1, probe=True)
        return Verdict(assertion.name, FAILURE, trace, t, trace.end, resolved_at=r.death)
    if eot == "strong":
        trace = builder.attempt_tree(body, t, length + 1, probe=True)
        return Verdict(assertion.name, FAILURE, trace, t, trace.end, resolved_at=length + 1)
    trace = builder.attempt_tree(body, t, length, probe=False)
    return Verdict(assertion.name, INCOMPLETE, trace, t, trace.end, resolved_at=length + 1)


def _resolve_cond(assertion, body, t, explorer, builder, length, eot) -> Verdict:
    ante = explorer.run(body.a, t)
    obligations = [(e, explorer.run(body.b, e + 1)) for e in ante.ends]
    failed = [(e, ob) for e, ob in obligations if not ob.ends and ob.death is not None]
    pending = [e for e, ob in obligations if not ob.ends and ob.death is None]

    if failed:
        death, ante_end = min((ob.death, e) for e, ob in failed)
        sub = builder.attempt_tree(body.b, ante_end + 1, length + 1, probe=True)
        kids = [builder.collapsed(body.a, t, ante_end), sub]
        trace = builder.make_node(">>", t, sub.end, 0, kids)
        return Verdict(assertion.name, FAILURE, trace, t, sub.end, resolved_at=death)

    if pending:
        ante_end = min(pending)
        if eot == "strong":
            sub = builder.attempt_tree(body.b, ante_end + 1, length + 1, probe=True)
            kids = [builder.collapsed(body.a, t, ante_end), sub]
            trace = builder.make_node(">>", t, sub.end, 0, kids)
            return Verdict(assertion.name, FAILURE, trace, t, sub.end, resolved_at=length + 1)
        sub = builder.attempt_tree(body.b, ante_end + 1, length, probe=False)
        kids = [builder.collapsed(body.a, t, ante_end)]
        if sub is not None:
            kids.append(sub)
        trace = builder.make_node(">>", t, length, 0, kids)
        return Verdict(assertion.name, INCOMPLETE, trace, t, length, resolved_at=length + 1)

    if not ante.ends:
        trace = builder.make_node(">>", t, t, 1, [])
        resolved = ante.death if ante.death is not None else length + 1
        return Verdict(assertion.name, VACUOUS, trace, t, t, resolved_at=resolved)

    witness_ante = min(ante.ends)
    witness_end = min(explorer.run(body.b, witness_ante + 1).ends)
    kids = [
        builder.witness(body.a, t, witness_ante),
        builder.witness(body.b, witness_ante + 1, witness_end),
    ]
    trace = builder.make_node(">>", t, witness_end, 1, kids)
    settle = [min(ob.ends) for _, ob in obligations]
    settle.append(ante.death if ante.death is not None else length + 1)
    return Verdict(assertion.name, MATCH, trace, t, witness_end, resolved_at=max(settle))

"""Boolean field expressions over events.

Predicates are the atoms of the assertion language: a named, total
boolean test over the current event.  Evaluation never raises; a lookup
of a missing argument compares as the empty string.
"""

from __future__ import annotations

from dataclasses import dataclass


# --- field-expression AST ---------------------------------------------------

@dataclass(frozen=True)
class FieldRef:
    # one of: tool, etype, agent
    name: str


@dataclass(frozen=True)
class ArgRef:
    key: str


@dataclass(frozen=True)
class StrLit:
    value: str


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Compare:
    # op is "==" or "!="
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class BoolOp:
    # op is "&&" or "||"
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Not:
    item: object


@dataclass(frozen=True)
class PredicateDef:
    name: str
    body: object


TRUE_BODY = BoolLit(True)


def _term_value(term, event) -> str:
    if isinstance(term, StrLit):
        return term.value
    if isinstance(term, ArgRef):
        return event.args.get(term.key, "")
    if isinstance(term, FieldRef):
        if term.name == "tool":
            return event.tool
        if term.name == "etype":
            return event.etype
        if term.name == "agent":
            return event.agent
    raise TypeError(f"not a term node: {term!r}")


def eval_body(body, event) -> bool:
    """Evaluate a field expression against one event.  Total."""
    if isinstance(body, BoolLit):
        return body.value
    if isinstance(body, Not):
        return not eval_body(body.item, event)
    if isinstance(body, BoolOp):
        if body.op == "&&":
            return eval_body(body.left, event) and eval_body(body.right, event)
        return eval_body(body.left, event) or eval_body(body.right, event)
    if isinstance(body, Compare):
        left = _term_value(body.left, event)
        right = _term_value(body.right, event)
        return left == right if body.op == "==" else left != right
    raise TypeError(f"not a predicate node: {body!r}")


def eval_predicate(pred: PredicateDef, event) -> bool:
    return eval_body(pred.body, event)


def format_body(body) -> str:
    """Render a field expression back to source form."""
    return _fmt(body, 0)


# precedence levels: || = 1, && = 2, atoms = 3
def _fmt(body, parent_level: int) -> str:
    if isinstance(body, BoolLit):
        return "true" if body.value else "false"
    if isinstance(body, FieldRef):
        return body.name
    if isinstance(body, ArgRef):
        return f'arg("{_escape(body.key)}")'
    if isinstance(body, StrLit):
        return f'"{_escape(body.value)}"'
    if isinstance(body, Not):
        return "!" + _fmt(body.item, 3)
    if isinstance(body, Compare):
        return f"{_fmt(body.left, 3)} {body.op} {_fmt(body.right, 3)}"
    if isinstance(body, BoolOp):
        level = 2 if body.op == "&&" else 1
        text = f"{_fmt(body.left, level)} {body.op} {_fmt(body.right, level)}"
        if level < parent_level:
            return f"({text})"
        return text
    raise TypeError(f"not a predicate node: {body!r}")


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')

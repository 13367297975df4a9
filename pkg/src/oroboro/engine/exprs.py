"""Temporal expression AST.

Seven node kinds: predicate leaves plus the six combinators.  A
conditional may only appear as the outermost node of an assertion body;
the parser and monitor both enforce that.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Pred:
    name: str
    capture: str | None = None


@dataclass(frozen=True)
class Concat:
    a: object
    b: object


@dataclass(frozen=True)
class Cond:
    a: object
    b: object


@dataclass(frozen=True)
class Alt:
    a: object
    b: object


@dataclass(frozen=True)
class Conj:
    a: object
    b: object


@dataclass(frozen=True)
class Fuse:
    a: object
    b: object


@dataclass(frozen=True)
class Repeat:
    item: object
    lo: int
    hi: int

    def __post_init__(self):
        if not (1 <= self.lo <= self.hi):
            raise ValueError("repeat bounds must satisfy 1 <= lo <= hi")


GLYPHS = {Concat: "+", Cond: ">>", Alt: "|", Conj: "&", Fuse: "/", Repeat: "*"}


def glyph(expr) -> str:
    if isinstance(expr, Pred):
        return expr.name
    return GLYPHS[type(expr)]


def min_len(expr) -> int:
    if isinstance(expr, Pred):
        return 1
    if isinstance(expr, (Concat, Cond)):
        return min_len(expr.a) + min_len(expr.b)
    if isinstance(expr, Alt):
        return min(min_len(expr.a), min_len(expr.b))
    if isinstance(expr, Conj):
        return max(min_len(expr.a), min_len(expr.b))
    if isinstance(expr, Fuse):
        return min_len(expr.a) + min_len(expr.b) - 1
    if isinstance(expr, Repeat):
        return expr.lo * min_len(expr.item)
    raise TypeError(f"not an expression node: {expr!r}")


def max_len(expr) -> int:
    if isinstance(expr, Pred):
        return 1
    if isinstance(expr, (Concat, Cond)):
        return max_len(expr.a) + max_len(expr.b)
    if isinstance(expr, Alt):
        return max(max_len(expr.a), max_len(expr.b))
    if isinstance(expr, Conj):
        return min(max_len(expr.a), max_len(expr.b))
    if isinstance(expr, Fuse):
        return max_len(expr.a) + max_len(expr.b) - 1
    if isinstance(expr, Repeat):
        return expr.hi * max_len(expr.item)
    raise TypeError(f"not an expression node: {expr!r}")


def walk(expr):
    """Yield every node of the expression tree, pre-order."""
    yield expr
    if isinstance(expr, Pred):
        return
    if isinstance(expr, Repeat):
        yield from walk(expr.item)
        return
    yield from walk(expr.a)
    yield from walk(expr.b)


def contains_cond(expr) -> bool:
    return any(isinstance(node, Cond) for node in walk(expr))


@dataclass(frozen=True)
class AssertionSpec:
    """A named assertion over a temporal expression.

    `always` spawns an attempt at every sampling index; `once` spawns a
    single attempt at index 1.  Vacuous verdicts are suppressed unless
    report_vacuous is set (or overridden monitor-wide).
    """

    name: str
    mode: str  # "always" | "once"
    body: object
    report_vacuous: bool = False

    def __post_init__(self):
        if self.mode not in ("always", "once"):
            raise ValueError(f"unknown assertion mode {self.mode!r}")


# --- source form -------------------------------------------------------------

# looser binds lower: >> 0, | 1, & 2, + 3, / 4, * 5
_LEVEL = {Cond: 0, Alt: 1, Conj: 2, Concat: 3, Fuse: 4, Repeat: 5}


def format_expr(expr) -> str:
    """Render an expression to parseable source text."""
    return _fmt(expr, -1)


def _fmt(expr, parent_level: int) -> str:
    if isinstance(expr, Pred):
        return expr.name if expr.capture is None else f"{expr.name} as {expr.capture}"
    level = _LEVEL[type(expr)]
    if isinstance(expr, Repeat):
        inner = _fmt(expr.item, level + 1)
        bounds = str(expr.lo) if expr.lo == expr.hi else f"({expr.lo}, {expr.hi})"
        text = f"{inner} * {bounds}"
    else:
        op = GLYPHS[type(expr)]
        # left-associative: right child needs parens at the same level
        text = f"{_fmt(expr.a, level)} {op} {_fmt(expr.b, level + 1)}"
    if level < parent_level:
        return f"({text})"
    return text

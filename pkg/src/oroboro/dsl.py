"""Assertion spec files: tokenizer, parser, and printers.

A spec file (`.ote`, UTF-8) declares a sampling filter, named predicates
over event fields, optional named expressions, and assertions:

    sampling on etype == "tool_call_pre";
    pred hello := tool == "say_hello";
    expr greet := hello + hello;
    assert always greets: hello >> hello + hello;

Comments run from `#` to end of line.  Operators, tightest to loosest:
`*`, `/`, `+`, `&`, `|`, `>>`; all binary operators are left-associative
and the conditional may appear only outermost.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

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
    walk,
)
from .engine.predicates import (
    ArgRef,
    BoolLit,
    BoolOp,
    Compare,
    FieldRef,
    Not,
    PredicateDef,
    StrLit,
    format_body,
)
from .errors import ConfigError, ParseError

RESERVED = {
    "sampling", "on", "pred", "expr", "assert", "always", "once", "as",
    "true", "false", "arg", "tool", "etype", "type", "agent",
}

_FIELD_NAMES = {"tool": "tool", "etype": "etype", "type": "etype", "agent": "agent"}


@dataclass
class SpecFile:
    """A parsed, fully resolved spec.  sampling None means the default
    filter (etype == "tool_call_pre")."""

    sampling: object | None = None
    predicates: list = field(default_factory=list)
    named_exprs: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)


class Token(NamedTuple):
    kind: str  # ident | int | string | op | eof
    text: str
    line: int
    col: int


_TWO_CHAR = (":=", "==", "!=", "&&", "||", ">>")
_ONE_CHAR = "(),;:|&+/*!"


def tokenize(source: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    i, n = 0, len(source)

    def error(msg, lexeme=""):
        raise ParseError(line, col, msg, lexeme)

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            tokens.append(Token("ident", text, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("int", source[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == '"':
            j = i + 1
            out = []
            while True:
                if j >= n or source[j] == "\n":
                    error("unterminated string literal", '"')
                c = source[j]
                if c == '"':
                    j += 1
                    break
                if c == "\\":
                    if j + 1 >= n or source[j + 1] not in ('"', "\\"):
                        error("bad escape in string literal", source[j : j + 2])
                    out.append(source[j + 1])
                    j += 2
                    continue
                out.append(c)
                j += 1
            tokens.append(Token("string", "".join(out), start_line, start_col))
            col += j - i
            i = j
            continue
        two = source[i : i + 2]
        if two in _TWO_CHAR:
            tokens.append(Token("op", two, start_line, start_col))
            i += 2
            col += 2
            continue
        if ch in _ONE_CHAR:
            tokens.append(Token("op", ch, start_line, start_col))
            i += 1
            col += 1
            continue
        error("unexpected character", ch)
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # --- token plumbing -------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_op(self, text) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text == text

    def at_word(self, text) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == text

    def expect_op(self, text) -> Token:
        if not self.at_op(text):
            tok = self.peek()
            raise ParseError(tok.line, tok.col, f"expected {text!r}", tok.text)
        return self.advance()

    def expect_word(self, text) -> Token:
        if not self.at_word(text):
            tok = self.peek()
            raise ParseError(tok.line, tok.col, f"expected {text!r}", tok.text)
        return self.advance()

    def expect_name(self) -> Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise ParseError(tok.line, tok.col, "expected a name", tok.text)
        if tok.text in RESERVED:
            raise ParseError(tok.line, tok.col, f"{tok.text!r} is a reserved word", tok.text)
        return self.advance()

    # --- declarations -----------------------------------------------------

    def spec(self) -> SpecFile:
        out = SpecFile()
        names: dict[str, str] = {}  # reference namespace: predicates + named exprs
        assertion_names: set[str] = set()
        while self.peek().kind != "eof":
            tok = self.peek()
            if self.at_word("sampling"):
                self.advance()
                self.expect_word("on")
                body = self.predexpr()
                self.expect_op(";")
                if out.sampling is not None:
                    raise ConfigError("duplicate sampling declaration", tok.line, tok.col)
                out.sampling = body
            elif self.at_word("pred"):
                self.advance()
                name_tok = self.expect_name()
                self.expect_op(":=")
                body = self.predexpr()
                self.expect_op(";")
                self._declare(names, name_tok, "predicate")
                out.predicates.append(PredicateDef(name_tok.text, body))
            elif self.at_word("expr"):
                self.advance()
                name_tok = self.expect_name()
                self.expect_op(":=")
                body = self.texpr(out)
                self.expect_op(";")
                self._check_cond(body, name_tok)
                self._declare(names, name_tok, "expression")
                out.named_exprs[name_tok.text] = body
            elif self.at_word("assert"):
                self.advance()
                mode_tok = self.peek()
                if self.at_word("always") or self.at_word("once"):
                    mode = self.advance().text
                else:
                    raise ParseError(
                        mode_tok.line, mode_tok.col, "expected 'always' or 'once'", mode_tok.text
                    )
                name_tok = self.expect_name()
                self.expect_op(":")
                body = self.texpr(out)
                self.expect_op(";")
                self._check_cond(body, name_tok)
                if name_tok.text in assertion_names:
                    raise ConfigError(
                        f"duplicate assertion name {name_tok.text!r}",
                        name_tok.line,
                        name_tok.col,
                    )
                assertion_names.add(name_tok.text)
                out.assertions.append(AssertionSpec(name_tok.text, mode, body))
            else:
                raise ParseError(
                    tok.line, tok.col,
                    "expected 'sampling', 'pred', 'expr', or 'assert'", tok.text,
                )
        return out

    @staticmethod
    def _declare(names: dict, tok: Token, what: str) -> None:
        if tok.text in names:
            raise ConfigError(
                f"duplicate name {tok.text!r} (already a {names[tok.text]})",
                tok.line,
                tok.col,
            )
        names[tok.text] = what

    @staticmethod
    def _check_cond(body, tok: Token) -> None:
        for node in walk(body):
            if isinstance(node, Cond) and node is not body:
                raise ParseError(tok.line, tok.col, "conditional must be outermost", tok.text)

    # --- temporal expressions ----------------------------------------------

    def texpr(self, spec: SpecFile):
        left = self.alt(spec)
        if self.at_op(">>"):
            self.advance()
            right = self.alt(spec)
            if self.at_op(">>"):
                tok = self.peek()
                raise ParseError(tok.line, tok.col, "conditional must be outermost", tok.text)
            return Cond(left, right)
        return left

    def alt(self, spec):
        left = self.conj(spec)
        while self.at_op("|"):
            self.advance()
            left = Alt(left, self.conj(spec))
        return left

    def conj(self, spec):
        left = self.cat(spec)
        while self.at_op("&"):
            self.advance()
            left = Conj(left, self.cat(spec))
        return left

    def cat(self, spec):
        left = self.fuse(spec)
        while self.at_op("+"):
            self.advance()
            left = Concat(left, self.fuse(spec))
        return left

    def fuse(self, spec):
        left = self.rep(spec)
        while self.at_op("/"):
            self.advance()
            left = Fuse(left, self.rep(spec))
        return left

    def rep(self, spec):
        node = self.atom(spec)
        if self.at_op("*"):
            star = self.advance()
            if self.peek().kind == "int":
                lo = hi = int(self.advance().text)
            elif self.at_op("("):
                self.advance()
                lo_tok = self.peek()
                if lo_tok.kind != "int":
                    raise ParseError(lo_tok.line, lo_tok.col, "expected repeat count", lo_tok.text)
                lo = int(self.advance().text)
                self.expect_op(",")
                hi_tok = self.peek()
                if hi_tok.kind != "int":
                    raise ParseError(hi_tok.line, hi_tok.col, "expected repeat count", hi_tok.text)
                hi = int(self.advance().text)
                self.expect_op(")")
            else:
                tok = self.peek()
                raise ParseError(tok.line, tok.col, "expected repeat count", tok.text)
            if not (1 <= lo <= hi):
                raise ParseError(
                    star.line, star.col, f"repeat bounds ({lo}, {hi}) must satisfy 1 <= n <= m"
                )
            node = Repeat(node, lo, hi)
        return node

    def atom(self, spec):
        if self.at_op("("):
            self.advance()
            inner = self.texpr(spec)
            self.expect_op(")")
            return inner
        tok = self.peek()
        if tok.kind != "ident":
            raise ParseError(tok.line, tok.col, "expected a predicate or expression name", tok.text)
        if tok.text in RESERVED:
            raise ParseError(tok.line, tok.col, f"{tok.text!r} is a reserved word", tok.text)
        self.advance()
        capture = None
        if self.at_word("as"):
            self.advance()
            capture = self.expect_name().text
        pred_names = {p.name for p in spec.predicates}
        if tok.text in pred_names:
            return Pred(tok.text, capture)
        if tok.text in spec.named_exprs:
            if capture is not None:
                raise ParseError(tok.line, tok.col, "capture requires a predicate", tok.text)
            return spec.named_exprs[tok.text]
        raise ConfigError(f"unknown name {tok.text!r}", tok.line, tok.col)

    # --- predicate field expressions ------------------------------------------

    def predexpr(self):
        return self.orx()

    def orx(self):
        left = self.andx()
        while self.at_op("||"):
            self.advance()
            left = BoolOp("||", left, self.andx())
        return left

    def andx(self):
        left = self.notx()
        while self.at_op("&&"):
            self.advance()
            left = BoolOp("&&", left, self.notx())
        return left

    def notx(self):
        if self.at_op("!"):
            self.advance()
            return Not(self.notx())
        return self.prim()

    def prim(self):
        if self.at_word("true"):
            self.advance()
            return BoolLit(True)
        if self.at_word("false"):
            self.advance()
            return BoolLit(False)
        if self.at_op("("):
            self.advance()
            inner = self.orx()
            self.expect_op(")")
            return inner
        left = self.term()
        op_tok = self.peek()
        if op_tok.kind == "op" and op_tok.text in ("==", "!="):
            self.advance()
            right = self.term()
            return Compare(op_tok.text, left, right)
        raise ParseError(op_tok.line, op_tok.col, "expected '==' or '!='", op_tok.text)

    def term(self):
        tok = self.peek()
        if tok.kind == "string":
            self.advance()
            return StrLit(tok.text)
        if tok.kind == "ident" and tok.text in _FIELD_NAMES:
            self.advance()
            return FieldRef(_FIELD_NAMES[tok.text])
        if tok.kind == "ident" and tok.text == "arg":
            self.advance()
            self.expect_op("(")
            key = self.peek()
            if key.kind != "string":
                raise ParseError(key.line, key.col, "arg() takes a string key", key.text)
            self.advance()
            self.expect_op(")")
            return ArgRef(key.text)
        raise ParseError(tok.line, tok.col, "expected a field, arg(...), or string", tok.text)


def parse_spec(source: str) -> SpecFile:
    """Parse spec source into a fully resolved SpecFile.

    Raises ParseError for lexical/syntax problems and ConfigError for
    duplicate or unresolved names; both carry 1-based positions.
    """
    return _Parser(tokenize(source)).spec()


# --- printers --------------------------------------------------------------------


def _tree_lines(expr, depth, lines):
    pad = "  " * depth
    if isinstance(expr, Pred):
        suffix = f" as {expr.capture}" if expr.capture else ""
        lines.append(f"{pad}pred {expr.name}{suffix}")
        return
    if isinstance(expr, Repeat):
        lines.append(f"{pad}repeat {expr.lo} {expr.hi}")
        _tree_lines(expr.item, depth + 1, lines)
        return
    label = {Cond: "cond", Concat: "concat", Alt: "alt", Conj: "conj", Fuse: "fuse"}[type(expr)]
    lines.append(f"{pad}{label}")
    _tree_lines(expr.a, depth + 1, lines)
    _tree_lines(expr.b, depth + 1, lines)


def dump_ast(spec: SpecFile) -> str:
    """Deterministic tree rendering of a parsed spec."""
    lines: list[str] = []
    if spec.sampling is not None:
        lines.append(f"sampling on {format_body(spec.sampling)}")
    for pred in spec.predicates:
        lines.append(f"pred {pred.name} := {format_body(pred.body)}")
    for name, body in spec.named_exprs.items():
        lines.append(f"expr {name} :=")
        _tree_lines(body, 1, lines)
    for assertion in spec.assertions:
        lines.append(f"assert {assertion.mode} {assertion.name}:")
        _tree_lines(assertion.body, 1, lines)
    return "\n".join(lines)


def format_spec(spec: SpecFile) -> str:
    """Pretty-print a SpecFile back to parseable source."""
    lines: list[str] = []
    if spec.sampling is not None:
        lines.append(f"sampling on {format_body(spec.sampling)};")
    for pred in spec.predicates:
        lines.append(f"pred {pred.name} := {format_body(pred.body)};")
    for name, body in spec.named_exprs.items():
        lines.append(f"expr {name} := {format_expr(body)};")
    for assertion in spec.assertions:
        lines.append(f"assert {assertion.mode} {assertion.name}: {format_expr(assertion.body)};")
    return "\n".join(lines) + ("\n" if lines else "")

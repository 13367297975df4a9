"""Derived length bounds and expression printing."""

import random

import pytest
from conftest import BIT_PREDS

from oroboro.engine.exprs import (
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

P, Q, R = Pred("p"), Pred("q"), Pred("r")


def test_length_bounds_match_the_derivation_rules():
    assert (min_len(P), max_len(P)) == (1, 1)
    cat = Concat(P, Concat(Q, R))
    assert (min_len(cat), max_len(cat)) == (3, 3)
    alt = Alt(P, Concat(P, Q))
    assert (min_len(alt), max_len(alt)) == (1, 2)
    conj = Conj(P, Concat(P, Q))
    assert (min_len(conj), max_len(conj)) == (2, 1)  # unsatisfiable, empty bounds
    fuse = Fuse(Concat(P, Q), Concat(Q, R))
    assert (min_len(fuse), max_len(fuse)) == (3, 3)
    rep = Repeat(Concat(P, Q), 2, 3)
    assert (min_len(rep), max_len(rep)) == (4, 6)


def test_repeat_bounds_validated():
    with pytest.raises(ValueError):
        Repeat(P, 0, 2)
    with pytest.raises(ValueError):
        Repeat(P, 3, 2)


def test_domain_type_validation():
    from oroboro.engine.events import Event
    from oroboro.engine.semantics import Span

    with pytest.raises(ValueError):
        Event(seq=0, ts=1, etype="custom")
    with pytest.raises(ValueError):
        Event(seq=1, ts=-1, etype="custom")
    with pytest.raises(ValueError):
        Event(seq=1, ts=1, etype="weird")
    with pytest.raises(ValueError):
        Span(2, 1)
    with pytest.raises(ValueError):
        Span(0, 1)
    assert Span(1, 1).vacuous is False


def test_assertion_mode_validated():
    with pytest.raises(ValueError):
        AssertionSpec("x", "sometimes", P)


def _rand_expr(rng, depth, allow_cond=False):
    if depth <= 0 or rng.random() < 0.3:
        name = rng.choice(BIT_PREDS)
        cap = f"c{rng.randint(0, 9)}" if rng.random() < 0.15 else None
        return Pred(name, cap)
    kind = rng.choice(("cat", "alt", "conj", "fuse", "rep"))
    if kind == "rep":
        lo = rng.randint(1, 3)
        return Repeat(_rand_expr(rng, depth - 1), lo, rng.randint(lo, 4))
    a, b = _rand_expr(rng, depth - 1), _rand_expr(rng, depth - 1)
    node = {"cat": Concat, "alt": Alt, "conj": Conj, "fuse": Fuse}[kind](a, b)
    if allow_cond and rng.random() < 0.2:
        return Cond(_rand_expr(rng, 1), node)
    return node


def test_format_expr_reparses_to_the_same_tree():
    from oroboro.dsl import parse_spec

    rng = random.Random(77)
    decls = "\n".join(f'pred {n} := arg("{n}") == "1";' for n in BIT_PREDS)
    for i in range(300):
        expr = _rand_expr(rng, rng.randint(1, 5), allow_cond=(i % 3 == 0))
        if isinstance(expr, Cond):
            src = f"{decls}\nassert always t: {format_expr(expr)};"
            spec = parse_spec(src)
            assert spec.assertions[0].body == expr
        else:
            src = f"{decls}\nexpr t := {format_expr(expr)};"
            spec = parse_spec(src)
            assert spec.named_exprs["t"] == expr


def test_format_expr_canonical_shapes():
    te1 = Cond(Pred("g"), Concat(Pred("h"), Pred("w")))
    assert format_expr(te1) == "g >> h + w"
    te = Alt(Concat(P, P), Concat(Concat(P, Q), P))
    assert format_expr(te) == "p + p | p + q + p"
    assert format_expr(Repeat(Alt(P, Q), 2, 3)) == "(p | q) * (2, 3)"

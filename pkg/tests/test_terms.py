import random

import pytest

from skelsem.errors import PathIntoLeaf, SortMismatch, UnknownVariable
from skelsem.terms import (
    BaseTerm,
    Ctor,
    TermVar,
    sort_of,
    substitute,
    subterm_at,
    term_vars,
)
from helpers import random_expr, random_stmt


def test_term_vars_examples(lang):
    a, b = TermVar("a"), TermVar("b")
    assert term_vars(Ctor("+", (a, Ctor("const", (BaseTerm("lit", 3),))))) == {"a"}
    assert term_vars(BaseTerm("lit", 5)) == frozenset()
    assert term_vars(Ctor("if", (a, b, a))) == {"a", "b"}


def test_sort_of_examples(lang):
    expr, stat, lit = lang.sorts["expr"], lang.sorts["stat"], lang.sorts["lit"]
    gamma = {"a": expr, "b": stat, "c": stat}
    assert sort_of(lang, gamma, Ctor("if", (TermVar("a"), TermVar("b"), TermVar("c")))) == stat
    assert sort_of(lang, {}, BaseTerm("lit", 7)) == lit
    with pytest.raises(SortMismatch):
        sort_of(lang, {"a": stat}, Ctor("var", (TermVar("a"),)))
    with pytest.raises(UnknownVariable):
        sort_of(lang, {}, TermVar("zzz"))


def test_substitute_examples():
    a = TermVar("a")
    five = BaseTerm("lit", 5)
    assert substitute({"a": five}, Ctor("const", (a,))) == Ctor("const", (five,))
    closed = Ctor("skip", ())
    assert substitute({}, closed) == closed
    assert substitute({"a": closed}, Ctor(";", (a, a))) == Ctor(";", (closed, closed))
    with pytest.raises(UnknownVariable):
        substitute({}, a)


def test_subterm_at_examples(lang):
    from skelsem.lang.surface import parse_term
    t = parse_term("while not (x = 0) do x := x - 1 end")
    assert subterm_at(t, (1,)) == parse_term("not (x = 0)")
    assert subterm_at(t, ()) == t
    with pytest.raises(PathIntoLeaf):
        subterm_at(Ctor("skip", ()), (1,))


def test_sort_substitution_commutes(lang):
    # sort is preserved when closing a term with a sort-respecting env
    rng = random.Random(11)
    expr = lang.sorts["expr"]
    for _ in range(150):
        open_term = Ctor("+", (TermVar("a"), random_expr(rng, depth=2)))
        image = random_expr(rng, depth=2)
        gamma = {"a": sort_of(lang, {}, image)}
        assert gamma["a"] == expr
        assert sort_of(lang, gamma, open_term) == sort_of(lang, {}, substitute({"a": image}, open_term))


def test_subterm_monoid_action(lang):
    rng = random.Random(5)
    for _ in range(150):
        t = random_stmt(rng, depth=3)
        points = _all_points(t)
        pp = rng.choice(points)
        inner_points = _all_points(subterm_at(t, pp))
        pp2 = rng.choice(inner_points)
        assert subterm_at(t, pp + pp2) == subterm_at(subterm_at(t, pp), pp2)


def _all_points(t):
    out = [()]
    if isinstance(t, Ctor):
        for k, arg in enumerate(t.args, start=1):
            out.extend((k,) + p for p in _all_points(arg))
    return out

"""Shared test constructors: abstract values, the state-splitting
fixture set, and random program generation."""

from __future__ import annotations

import random

from skelsem.domains import Bool4, INT_BOT, POS_INF, interval
from skelsem.fmap import FrozenMap
from skelsem.lang.surface import parse_term
from skelsem.terms import BaseTerm, Ctor


def iv(lo, hi):
    """Abstract While value: integer interval, no boolean part."""
    return (interval(lo, hi), Bool4.BOT)


def bl(b):
    """Abstract While value: boolean part only."""
    return (INT_BOT, b)


def ast(**kw):
    """Abstract state over identifiers."""
    return FrozenMap(kw)


def cst(**kw):
    """Concrete state."""
    return FrozenMap(kw)


def splitting_fixture(lang):
    """The countdown loop with its fourteen-judgement certificate.

    Returns (loop term, judgement set); the set certifies, via state
    splitting, that running the loop from x in [0, inf] ends at x = 0.
    """
    t = parse_term("while not (x = 0) do x := x - 1 end")
    e_x = parse_term("x")
    e_0 = parse_term("0")
    e_m1 = parse_term("-1")
    e_eq = parse_term("x = 0")
    e_not = parse_term("not (x = 0)")
    e_sub = parse_term("x - 1")
    s_asn = parse_term("x := x - 1")
    x0 = ast(x=iv(0, 0))
    x1inf = ast(x=iv(1, POS_INF))
    triples = frozenset({
        (x0, e_0, iv(0, 0)), (x1inf, e_0, iv(0, 0)),
        (x0, e_m1, iv(-1, -1)), (x1inf, e_m1, iv(-1, -1)),
        (x0, e_x, iv(0, 0)), (x1inf, e_x, iv(1, POS_INF)),
        (x0, e_eq, bl(Bool4.TT)), (x1inf, e_eq, bl(Bool4.FF)),
        (x0, e_not, bl(Bool4.FF)), (x1inf, e_not, bl(Bool4.TT)),
        (x1inf, e_sub, iv(0, POS_INF)),
        (x1inf, s_asn, ast(x=iv(0, POS_INF))),
        (x0, t, x0), (x1inf, t, x0),
    })
    return t, triples


# -- random program generation -------------------------------------------


def random_expr(rng: random.Random, vars=("x", "y"), depth: int = 3, want_bool=False):
    """Random well-sorted closed expression over integer-valued variables."""
    if want_bool:
        if depth <= 0 or rng.random() < 0.5:
            return Ctor("=", (random_expr(rng, vars, 0), random_expr(rng, vars, 0)))
        return Ctor("not", (random_expr(rng, vars, depth - 1, want_bool=True),))
    if depth <= 0:
        if rng.random() < 0.5:
            return Ctor("const", (BaseTerm("lit", rng.randint(-3, 3)),))
        return Ctor("var", (BaseTerm("ident", rng.choice(vars)),))
    return Ctor("+", (random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1)))


def random_stmt(rng: random.Random, vars=("x", "y"), depth: int = 3):
    """Random well-sorted closed statement; loops are bounded countdowns
    so evaluation terminates."""
    roll = rng.random()
    if depth <= 0 or roll < 0.25:
        if rng.random() < 0.3:
            return Ctor("skip", ())
        return Ctor(":=", (BaseTerm("ident", rng.choice(vars)),
                           random_expr(rng, vars, rng.randint(0, 2))))
    if roll < 0.55:
        return Ctor(";", (random_stmt(rng, vars, depth - 1),
                          random_stmt(rng, vars, depth - 1)))
    if roll < 0.85:
        return Ctor("if", (random_expr(rng, vars, 1, want_bool=True),
                           random_stmt(rng, vars, depth - 1),
                           random_stmt(rng, vars, depth - 1)))
    v = rng.choice(vars)
    guard = Ctor("not", (Ctor("=", (Ctor("var", (BaseTerm("ident", v),)),
                                    Ctor("const", (BaseTerm("lit", 0),)))),))
    dec = Ctor(":=", (BaseTerm("ident", v),
                      Ctor("+", (Ctor("var", (BaseTerm("ident", v),)),
                                 Ctor("const", (BaseTerm("lit", -1),))))))
    body = Ctor(";", (random_stmt(rng, vars, 0), dec)) if rng.random() < 0.4 else dec
    return Ctor("while", (guard, body))


def random_concrete_state(rng: random.Random, vars=("x", "y")):
    return FrozenMap({v: rng.randint(0, 4) for v in vars if rng.random() < 0.9})


def random_ext_expr(rng: random.Random, vars=("x", "y"), depth: int = 2, want_bool=False):
    if want_bool:
        return Ctor("=", (random_ext_expr(rng, vars, 0), random_ext_expr(rng, vars, 0)))
    if depth <= 0:
        roll = rng.random()
        if roll < 0.4:
            return Ctor("const", (BaseTerm("lit", rng.randint(-3, 3)),))
        if roll < 0.8:
            return Ctor("var", (BaseTerm("ident", rng.choice(vars)),))
        return Ctor("in", ())
    return Ctor("+", (random_ext_expr(rng, vars, depth - 1),
                      random_ext_expr(rng, vars, depth - 1)))


def random_ext_stmt(rng: random.Random, vars=("x", "y"), depth: int = 3):
    roll = rng.random()
    if depth <= 0 or roll < 0.3:
        r = rng.random()
        if r < 0.15:
            return Ctor("skip", ())
        if r < 0.3:
            return Ctor("throw", ())
        if r < 0.5:
            return Ctor("out", (random_ext_expr(rng, vars, 1),))
        return Ctor(":=", (BaseTerm("ident", rng.choice(vars)),
                           random_ext_expr(rng, vars, rng.randint(0, 2))))
    if roll < 0.55:
        return Ctor(";", (random_ext_stmt(rng, vars, depth - 1),
                          random_ext_stmt(rng, vars, depth - 1)))
    if roll < 0.75:
        return Ctor("try", (random_ext_stmt(rng, vars, depth - 1),
                            random_ext_stmt(rng, vars, depth - 1)))
    if roll < 0.9:
        return Ctor("if", (random_ext_expr(rng, vars, 1, want_bool=True),
                           random_ext_stmt(rng, vars, depth - 1),
                           random_ext_stmt(rng, vars, depth - 1)))
    # heap round trip: allocate then update then read back
    v = rng.choice(vars)
    return Ctor(";", (
        Ctor(":=", (BaseTerm("ident", v), Ctor("ref", (random_ext_expr(rng, vars, 0),)))),
        Ctor(";", (
            Ctor("<-", (Ctor("var", (BaseTerm("ident", v),)),
                        random_ext_expr(rng, vars, 0))),
            Ctor(":=", (BaseTerm("ident", rng.choice(vars)),
                        Ctor("!", (Ctor("var", (BaseTerm("ident", v),)),)))),
        )),
    ))


def build_seed(spec):
    """Abstract seed state from a corpus spec: (lo, hi) intervals with
    None = unbounded, or "tt"/"ff"/"top" booleans."""
    out = {}
    for k, v in spec.items():
        if isinstance(v, tuple):
            lo, hi = v
            out[k] = iv(lo, POS_INF if hi is None else hi)
        else:
            out[k] = bl(Bool4(v))
    return FrozenMap(out)

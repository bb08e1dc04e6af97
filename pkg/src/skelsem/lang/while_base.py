"""The base While language pack.

Ten constructors over expressions and statements, thirteen filters, the
partial concrete filter functions, and an interval/four-point-boolean
abstract instantiation.  Expressions map states to values, statements
map states to states.
"""

from __future__ import annotations

from ..domains import (
    INT_BOT,
    Bool4,
    Bool4Domain,
    BotValue,
    FlatTermDomain,
    Interval,
    IntervalDomain,
    MapDomain,
    UnionValueDomain,
    interval,
    interval_meet,
)
from ..fmap import FrozenMap
from ..language import LanguageDefinition
from ..skeletons import FlowVar, Skeleton, X_IN, X_OUT, body, branches, filt, hook
from ..terms import (
    BaseTerm,
    ConstructorSignature,
    Ctor,
    FilterSignature,
    TermVar,
    base_sort,
    flow_sort,
    program_sort,
)
from .surface import parse_program, parse_term, print_term  # noqa: F401  (re-exported)

IDENT = base_sort("ident")
LIT = base_sort("lit")
EXPR = program_sort("expr")
STAT = program_sort("stat")
STATE = flow_sort("State")
VAL = flow_sort("Val")
INT = flow_sort("Int")
BOOL = flow_sort("Bool")

_T = TermVar
_F = FlowVar

f1, f1p, f2, f2p, f3 = _F("f1"), _F("f1'"), _F("f2"), _F("f2'"), _F("f3")


def _skeletons() -> tuple[Skeleton, ...]:
    t, t1, t2, t3 = _T("t"), _T("t1"), _T("t2"), _T("t3")
    return (
        Skeleton("Lit", "const", ("t",), body(
            filt("litInt", [t], [f1]),
            filt("intVal", [f1], [X_OUT]),
        )),
        Skeleton("Var", "var", ("t",), body(
            filt("read", [t, X_IN], [X_OUT]),
        )),
        Skeleton("Add", "+", ("t1", "t2"), body(
            hook(X_IN, t1, f1),
            filt("isInt", [f1], [f1p]),
            hook(X_IN, t2, f2),
            filt("isInt", [f2], [f2p]),
            filt("add", [f1p, f2p], [f3]),
            filt("intVal", [f3], [X_OUT]),
        )),
        Skeleton("Eq", "=", ("t1", "t2"), body(
            hook(X_IN, t1, f1),
            filt("isInt", [f1], [f1p]),
            hook(X_IN, t2, f2),
            filt("isInt", [f2], [f2p]),
            filt("eq", [f1p, f2p], [f3]),
            filt("boolVal", [f3], [X_OUT]),
        )),
        Skeleton("Neg", "not", ("t",), body(
            hook(X_IN, t, f1),
            filt("isBool", [f1], [f2]),
            filt("neg", [f2], [f3]),
            filt("boolVal", [f3], [X_OUT]),
        )),
        Skeleton("Skip", "skip", (), body(
            filt("id", [X_IN], [X_OUT]),
        )),
        Skeleton("Asn", ":=", ("t1", "t2"), body(
            hook(X_IN, t2, f1),
            filt("write", [t1, X_IN, f1], [X_OUT]),
        )),
        Skeleton("Seq", ";", ("t1", "t2"), body(
            hook(X_IN, t1, f1),
            hook(f1, t2, X_OUT),
        )),
        Skeleton("If", "if", ("t1", "t2", "t3"), body(
            hook(X_IN, t1, f1),
            filt("isBool", [f1], [f1p]),
            branches(
                {X_OUT},
                body(filt("isTrue", [f1p], []), hook(X_IN, t2, X_OUT)),
                body(filt("isFalse", [f1p], []), hook(X_IN, t3, X_OUT)),
            ),
        )),
        Skeleton("While", "while", ("t1", "t2"), body(
            hook(X_IN, t1, f1),
            filt("isBool", [f1], [f1p]),
            branches(
                {X_OUT},
                body(
                    filt("isTrue", [f1p], []),
                    hook(X_IN, t2, f2),
                    hook(f2, Ctor("while", (t1, t2)), X_OUT),
                ),
                body(filt("isFalse", [f1p], []), filt("id", [X_IN], [X_OUT])),
            ),
        )),
    )


# -- concrete filters ---------------------------------------------------------
# Partial relations: an empty result set means the filter does not apply.


def _is_int(v) -> bool:
    return type(v) is int


def _is_bool(v) -> bool:
    return type(v) is bool


def _concrete_filters():
    def litInt(args):
        (t,) = args
        return [(t.payload,)]

    def intVal(args):
        return [args]

    def boolVal(args):
        return [args]

    def isInt(args):
        (v,) = args
        return [(v,)] if _is_int(v) else []

    def isBool(args):
        (v,) = args
        return [(v,)] if _is_bool(v) else []

    def add(args):
        i, j = args
        return [(i + j,)]

    def eq(args):
        i, j = args
        return [(i == j,)]

    def neg(args):
        (b,) = args
        return [(not b,)]

    def read(args):
        t, st = args
        name = t.payload
        return [(st[name],)] if name in st else []

    def write(args):
        t, st, v = args
        return [(st.set(t.payload, v),)]

    def ident(args):
        return [args]

    def isTrue(args):
        (b,) = args
        return [()] if b is True else []

    def isFalse(args):
        (b,) = args
        return [()] if b is False else []

    return {
        "litInt": litInt, "intVal": intVal, "boolVal": boolVal,
        "isInt": isInt, "isBool": isBool, "add": add, "eq": eq, "neg": neg,
        "read": read, "write": write, "id": ident,
        "isTrue": isTrue, "isFalse": isFalse,
    }


# -- abstract filters ---------------------------------------------------------
# Total monotone functions; None signals the ⊥ result ("does not apply").

VAL_BOT = (INT_BOT, Bool4.BOT)
STATE_BOT = BotValue("State")


def _abstract_filters(state_dom: MapDomain):
    def litInt(args):
        (t,) = args
        if isinstance(t, BotValue):
            return (INT_BOT,)
        return (Interval(t.payload, t.payload),)

    def intVal(args):
        (i,) = args
        return ((i, Bool4.BOT),)

    def boolVal(args):
        (b,) = args
        return ((INT_BOT, b),)

    def isInt(args):
        return (args[0][0],)

    def isBool(args):
        return (args[0][1],)

    def add(args):
        i1, i2 = args
        if i1 == INT_BOT or i2 == INT_BOT:
            return (INT_BOT,)
        return (interval(i1.lo + i2.lo, i1.hi + i2.hi),)

    def eq(args):
        i1, i2 = args
        if i1 == INT_BOT or i2 == INT_BOT:
            return (Bool4.BOT,)
        if i1.lo == i1.hi and i1 == i2:
            return (Bool4.TT,)
        if interval_meet(i1, i2) == INT_BOT:
            return (Bool4.FF,)
        return (Bool4.TOP,)

    def neg(args):
        (b,) = args
        if b is Bool4.TT:
            return (Bool4.FF,)
        if b is Bool4.FF:
            return (Bool4.TT,)
        return (b,)

    def read(args):
        t, st = args
        if isinstance(t, BotValue) or isinstance(st, BotValue):
            return (VAL_BOT,)
        return (st.get(t.payload, VAL_BOT),)

    def write(args):
        t, st, v = args
        if isinstance(t, BotValue) or isinstance(st, BotValue):
            return (STATE_BOT,)
        return (state_dom.canon(st.set(t.payload, v)),)

    def ident(args):
        return args

    def isTrue(args):
        (b,) = args
        return None if b in (Bool4.BOT, Bool4.FF) else ()

    def isFalse(args):
        (b,) = args
        return None if b in (Bool4.BOT, Bool4.TT) else ()

    return {
        "litInt": litInt, "intVal": intVal, "boolVal": boolVal,
        "isInt": isInt, "isBool": isBool, "add": add, "eq": eq, "neg": neg,
        "read": read, "write": write, "id": ident,
        "isTrue": isTrue, "isFalse": isFalse,
    }


def _sample_terms():
    lits = [BaseTerm("lit", n) for n in (-1, 0, 1, 5)]
    idents = [BaseTerm("ident", x) for x in ("x", "y")]
    exprs = [Ctor("const", (lits[1],)), Ctor("var", (idents[0],)),
             Ctor("+", (Ctor("var", (idents[0],)), Ctor("const", (lits[2],))))]
    stats = [Ctor("skip", ()), Ctor(":=", (idents[0], exprs[0]))]
    return lits, idents, exprs, stats


def while_language() -> LanguageDefinition:
    sorts = {s.name: s for s in (IDENT, LIT, EXPR, STAT, STATE, VAL, INT, BOOL)}
    constructors = {
        "const": ConstructorSignature("const", (LIT,), EXPR),
        "var": ConstructorSignature("var", (IDENT,), EXPR),
        "+": ConstructorSignature("+", (EXPR, EXPR), EXPR),
        "=": ConstructorSignature("=", (EXPR, EXPR), EXPR),
        "not": ConstructorSignature("not", (EXPR,), EXPR),
        "skip": ConstructorSignature("skip", (), STAT),
        ":=": ConstructorSignature(":=", (IDENT, EXPR), STAT),
        ";": ConstructorSignature(";", (STAT, STAT), STAT),
        "if": ConstructorSignature("if", (EXPR, STAT, STAT), STAT),
        "while": ConstructorSignature("while", (EXPR, STAT), STAT),
    }
    filters = {
        "litInt": FilterSignature("litInt", (LIT,), (INT,)),
        "intVal": FilterSignature("intVal", (INT,), (VAL,)),
        "isInt": FilterSignature("isInt", (VAL,), (INT,)),
        "add": FilterSignature("add", (INT, INT), (INT,)),
        "boolVal": FilterSignature("boolVal", (BOOL,), (VAL,)),
        "isBool": FilterSignature("isBool", (VAL,), (BOOL,)),
        "isTrue": FilterSignature("isTrue", (BOOL,), ()),
        "isFalse": FilterSignature("isFalse", (BOOL,), ()),
        "eq": FilterSignature("eq", (INT, INT), (BOOL,)),
        "neg": FilterSignature("neg", (BOOL,), (BOOL,)),
        "read": FilterSignature("read", (IDENT, STATE), (VAL,)),
        "write": FilterSignature("write", (IDENT, STATE, VAL), (STATE,)),
        "id": FilterSignature("id", (STATE,), (STATE,)),
    }

    int_dom = IntervalDomain()
    bool_dom = Bool4Domain()
    val_dom = UnionValueDomain("Val", [
        ("int", int_dom, _is_int),
        ("bool", bool_dom, _is_bool),
    ])
    state_dom = MapDomain("State", val_dom, tag="State", json_tag="state")

    lits, idents, exprs, stats = _sample_terms()
    domains = {
        "Int": int_dom,
        "Bool": bool_dom,
        "Val": val_dom,
        "State": state_dom,
        "lit": FlatTermDomain("lit", lits),
        "ident": FlatTermDomain("ident", idents),
        "expr": FlatTermDomain("expr", exprs),
        "stat": FlatTermDomain("stat", stats),
    }

    def _is_val(v):
        return _is_int(v) or _is_bool(v)

    def _is_state(v):
        return isinstance(v, FrozenMap) and all(
            isinstance(k, str) and _is_val(x) for k, x in v.items())

    return LanguageDefinition(
        name="while",
        sorts=sorts,
        constructors=constructors,
        filters=filters,
        skeletons=_skeletons(),
        flow_in={"expr": "State", "stat": "State"},
        flow_out={"expr": "Val", "stat": "State"},
        base_payloads={"lit": _is_int, "ident": lambda v: isinstance(v, str)},
        value_sorts={"Int": _is_int, "Bool": _is_bool, "Val": _is_val, "State": _is_state},
        concrete_filters=_concrete_filters(),
        abstract_filters=_abstract_filters(state_dom),
        domains=domains,
    )


def parse_while(source: str):
    """Parse base-While surface syntax into a closed program term."""
    return parse_program(source, ext=False)


def state(mapping) -> FrozenMap:
    """Concrete state from a plain dict."""
    return FrozenMap(mapping)

"""Extended While: exceptions, input/output streams, and a heap.

Expressions map an I/O state (input, output, store, heap) to a value
paired with an I/O state; statements return an I/O state tagged ok or
exception.  Streams get a coarse abstraction (one value bounding every
element), heaps a precise one (allocation counter kept exact, store
abstracted pointwise), locations finite sets of addresses.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..domains import (
    INT_BOT,
    Bool4,
    Bool4Domain,
    BotValue,
    FiniteSetDomain,
    FlatTermDomain,
    HeapDomain,
    Interval,
    IntervalDomain,
    MapDomain,
    StreamDomain,
    TupleDomain,
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
from .surface import parse_program
from .while_base import _is_bool, _is_int

IDENT = base_sort("ident")
LIT = base_sort("lit")
EXPR = program_sort("expr")
STAT = program_sort("stat")
STATE = flow_sort("State")
VAL = flow_sort("Val")
INT = flow_sort("Int")
BOOL = flow_sort("Bool")
IN = flow_sort("In")
OUT = flow_sort("Out")
HEAP = flow_sort("Heap")
LOC = flow_sort("Loc")
IOSTATE = flow_sort("IOState")
VALIOSTATE = flow_sort("ValIOState")
EXCIOSTATE = flow_sort("ExcIOState")


@dataclass(frozen=True)
class Loc:
    addr: int

    def __repr__(self):
        return f"loc:{self.addr}"


def _is_loc(v) -> bool:
    return isinstance(v, Loc)


_T = TermVar
_F = FlowVar

w, w1, w2 = _F("w"), _F("w1"), _F("w2")
v, v1, v2, vp = _F("v"), _F("v1"), _F("v2"), _F("v'")
n, n1, n2 = _F("n"), _F("n1"), _F("n2")
b, bp = _F("b"), _F("b'")
i, ip, o, op_ = _F("i"), _F("i'"), _F("o"), _F("o'")
st, stp = _F("st"), _F("st'")
h, hp = _F("h"), _F("h'")
l = _F("l")
sg, sg1, sg2, sgp, sgpp = _F("sg"), _F("sg1"), _F("sg2"), _F("sg'"), _F("sg''")
e = _F("e")


def _split(src, outs):
    return filt("splitSt", [src], outs)


def _skeletons() -> tuple[Skeleton, ...]:
    t, t1, t2, t3 = _T("t"), _T("t1"), _T("t2"), _T("t3")
    return (
        Skeleton("Lit", "const", ("t",), body(
            filt("litInt", [t], [n]),
            filt("intVal", [n], [v]),
            filt("mkValSt", [v, X_IN], [X_OUT]),
        )),
        Skeleton("Var", "var", ("t",), body(
            _split(X_IN, [i, o, st, h]),
            filt("read", [t, st], [v]),
            filt("mkSt", [i, o, st, h], [sg]),
            filt("mkValSt", [v, sg], [X_OUT]),
        )),
        Skeleton("In", "in", (), body(
            _split(X_IN, [i, o, st, h]),
            filt("in", [i], [v, ip]),
            filt("mkSt", [ip, o, st, h], [sg]),
            filt("mkValSt", [v, sg], [X_OUT]),
        )),
        Skeleton("Alloc", "ref", ("t",), body(
            hook(X_IN, t, w),
            filt("getValSt", [w], [v, sg]),
            _split(sg, [i, o, st, h]),
            filt("alloc", [h, v], [hp, l]),
            filt("locVal", [l], [vp]),
            filt("mkSt", [i, o, st, hp], [sgp]),
            filt("mkValSt", [vp, sgp], [X_OUT]),
        )),
        Skeleton("Acc", "!", ("t",), body(
            hook(X_IN, t, w),
            filt("getValSt", [w], [v, sg]),
            filt("isLoc", [v], [l]),
            _split(sg, [i, o, st, h]),
            filt("get", [l, h], [vp]),
            filt("mkSt", [i, o, st, h], [sgp]),
            filt("mkValSt", [vp, sgp], [X_OUT]),
        )),
        Skeleton("Add", "+", ("t1", "t2"), body(
            hook(X_IN, t1, w1),
            filt("getValSt", [w1], [v1, sg1]),
            filt("isInt", [v1], [n1]),
            hook(sg1, t2, w2),
            filt("getValSt", [w2], [v2, sg2]),
            filt("isInt", [v2], [n2]),
            filt("add", [n1, n2], [n]),
            filt("intVal", [n], [v]),
            filt("mkValSt", [v, sg2], [X_OUT]),
        )),
        Skeleton("Eq", "=", ("t1", "t2"), body(
            hook(X_IN, t1, w1),
            filt("getValSt", [w1], [v1, sg1]),
            filt("isInt", [v1], [n1]),
            hook(sg1, t2, w2),
            filt("getValSt", [w2], [v2, sg2]),
            filt("isInt", [v2], [n2]),
            filt("eq", [n1, n2], [b]),
            filt("boolVal", [b], [v]),
            filt("mkValSt", [v, sg2], [X_OUT]),
        )),
        Skeleton("Neg", "not", ("t",), body(
            hook(X_IN, t, w),
            filt("getValSt", [w], [v, sg]),
            filt("isBool", [v], [b]),
            filt("neg", [b], [bp]),
            filt("boolVal", [bp], [vp]),
            filt("mkValSt", [vp, sg], [X_OUT]),
        )),
        Skeleton("Skip", "skip", (), body(
            filt("mkOK", [X_IN], [X_OUT]),
        )),
        Skeleton("Throw", "throw", (), body(
            filt("mkExc", [X_IN], [X_OUT]),
        )),
        Skeleton("Asn", ":=", ("t1", "t2"), body(
            hook(X_IN, t2, w),
            filt("getValSt", [w], [v, sg]),
            _split(sg, [i, o, st, h]),
            filt("write", [t1, st, v], [stp]),
            filt("mkSt", [i, o, stp, h], [sgp]),
            filt("mkOK", [sgp], [X_OUT]),
        )),
        Skeleton("Set", "<-", ("t1", "t2"), body(
            hook(X_IN, t1, w1),
            filt("getValSt", [w1], [v1, sg]),
            filt("isLoc", [v1], [l]),
            hook(sg, t2, w2),
            filt("getValSt", [w2], [v2, sgp]),
            _split(sgp, [i, o, st, h]),
            filt("set", [l, h, v2], [hp]),
            filt("mkSt", [i, o, st, hp], [sgpp]),
            filt("mkOK", [sgpp], [X_OUT]),
        )),
        Skeleton("Out", "out", ("t1",), body(
            hook(X_IN, t1, w),
            filt("getValSt", [w], [v, sg]),
            _split(sg, [i, o, st, h]),
            filt("out", [o, v], [op_]),
            filt("mkSt", [i, op_, st, h], [sgp]),
            filt("mkOK", [sgp], [X_OUT]),
        )),
        Skeleton("Seq", ";", ("t1", "t2"), body(
            hook(X_IN, t1, e),
            branches(
                {X_OUT},
                body(filt("isOK", [e], [sg]), hook(sg, t2, X_OUT)),
                body(filt("isExc", [e], [sgp]), filt("mkExc", [sgp], [X_OUT])),
            ),
        )),
        Skeleton("Try", "try", ("t1", "t2"), body(
            hook(X_IN, t1, e),
            branches(
                {X_OUT},
                body(filt("isOK", [e], [sg]), filt("mkOK", [sg], [X_OUT])),
                body(filt("isExc", [e], [sgp]), hook(sgp, t2, X_OUT)),
            ),
        )),
        Skeleton("If", "if", ("t1", "t2", "t3"), body(
            hook(X_IN, t1, w),
            filt("getValSt", [w], [v, sg]),
            filt("isBool", [v], [b]),
            branches(
                {X_OUT},
                body(filt("isTrue", [b], []), hook(sg, t2, X_OUT)),
                body(filt("isFalse", [b], []), hook(sg, t3, X_OUT)),
            ),
        )),
        Skeleton("While", "while", ("t1", "t2"), body(
            hook(X_IN, t1, w),
            filt("getValSt", [w], [v, sg]),
            filt("isBool", [v], [b]),
            branches(
                {X_OUT},
                body(
                    filt("isTrue", [b], []),
                    hook(sg, t2, e),
                    branches(
                        {X_OUT},
                        body(filt("isOK", [e], [sgp]),
                             hook(sgp, Ctor("while", (t1, t2)), X_OUT)),
                        body(filt("isExc", [e], [sgpp]),
                             filt("mkExc", [sgpp], [X_OUT])),
                    ),
                ),
                body(filt("isFalse", [b], []), filt("mkOK", [sg], [X_OUT])),
            ),
        )),
    )


# -- concrete filters ---------------------------------------------------------


def _concrete_filters():
    def litInt(args):
        return [(args[0].payload,)]

    def intVal(args):
        return [args]

    def boolVal(args):
        return [args]

    def locVal(args):
        return [args]

    def isInt(args):
        return [args] if _is_int(args[0]) else []

    def isBool(args):
        return [args] if _is_bool(args[0]) else []

    def isLoc(args):
        return [args] if _is_loc(args[0]) else []

    def add(args):
        return [(args[0] + args[1],)]

    def eq(args):
        return [(args[0] == args[1],)]

    def neg(args):
        return [(not args[0],)]

    def read(args):
        t, store = args
        return [(store[t.payload],)] if t.payload in store else []

    def write(args):
        t, store, value = args
        return [(store.set(t.payload, value),)]

    def ident(args):
        return [args]

    def isTrue(args):
        return [()] if args[0] is True else []

    def isFalse(args):
        return [()] if args[0] is False else []

    def infilter(args):
        (stream,) = args
        if not stream:
            return []
        return [(stream[0], stream[1:])]

    def outfilter(args):
        stream, value = args
        return [(stream + (value,),)]

    def alloc(args):
        (nxt, store), value = args
        return [(((nxt + 1), store.set(nxt, value)), Loc(nxt))]

    def get(args):
        loc, (nxt, store) = args
        return [(store[loc.addr],)] if loc.addr in store else []

    def set_(args):
        loc, (nxt, store), value = args
        if loc.addr not in store:
            return []
        return [((nxt, store.set(loc.addr, value)),)]

    def mkSt(args):
        return [(tuple(args),)]

    def splitSt(args):
        return [tuple(args[0])]

    def mkValSt(args):
        return [(tuple(args),)]

    def getValSt(args):
        return [tuple(args[0])]

    def mkOK(args):
        return [((True, args[0]),)]

    def mkExc(args):
        return [((False, args[0]),)]

    def isOK(args):
        flag, io = args[0]
        return [(io,)] if flag else []

    def isExc(args):
        flag, io = args[0]
        return [] if flag else [(io,)]

    return {
        "litInt": litInt, "intVal": intVal, "boolVal": boolVal, "locVal": locVal,
        "isInt": isInt, "isBool": isBool, "isLoc": isLoc,
        "add": add, "eq": eq, "neg": neg, "read": read, "write": write, "id": ident,
        "isTrue": isTrue, "isFalse": isFalse,
        "in": infilter, "out": outfilter, "alloc": alloc, "get": get, "set": set_,
        "mkSt": mkSt, "splitSt": splitSt, "mkValSt": mkValSt, "getValSt": getValSt,
        "mkOK": mkOK, "mkExc": mkExc, "isOK": isOK, "isExc": isExc,
    }


# -- abstract filters ---------------------------------------------------------

VAL_BOT = (INT_BOT, Bool4.BOT, frozenset())


def _abstract_filters(doms):
    state_dom: MapDomain = doms["State"]
    stream_dom: StreamDomain = doms["In"]
    heap_dom: HeapDomain = doms["Heap"]
    io_dom: TupleDomain = doms["IOState"]
    val_dom = doms["Val"]

    def litInt(args):
        (t,) = args
        if isinstance(t, BotValue):
            return (INT_BOT,)
        return (Interval(t.payload, t.payload),)

    def intVal(args):
        return ((args[0], Bool4.BOT, frozenset()),)

    def boolVal(args):
        return ((INT_BOT, args[0], frozenset()),)

    def locVal(args):
        return ((INT_BOT, Bool4.BOT, args[0]),)

    def isInt(args):
        return (args[0][0],)

    def isBool(args):
        return (args[0][1],)

    def isLoc(args):
        return (args[0][2],)

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
        (x,) = args
        if x is Bool4.TT:
            return (Bool4.FF,)
        if x is Bool4.FF:
            return (Bool4.TT,)
        return (x,)

    def read(args):
        t, store = args
        if isinstance(t, BotValue) or isinstance(store, BotValue):
            return (VAL_BOT,)
        return (store.get(t.payload, VAL_BOT),)

    def write(args):
        t, store, value = args
        if isinstance(t, BotValue) or isinstance(store, BotValue):
            return (state_dom.bot,)
        return (state_dom.canon(store.set(t.payload, value)),)

    def ident(args):
        return args

    def isTrue(args):
        return None if args[0] in (Bool4.BOT, Bool4.FF) else ()

    def isFalse(args):
        return None if args[0] in (Bool4.BOT, Bool4.TT) else ()

    def infilter(args):
        (stream,) = args
        if isinstance(stream, BotValue):
            return (VAL_BOT, stream_dom.bot)
        return (stream, stream)

    def outfilter(args):
        stream, value = args
        return (stream_dom.join(stream, value),)

    def alloc(args):
        heap, value = args
        if isinstance(heap, BotValue):
            return (heap_dom.bot, frozenset())
        nxt, store = heap
        return ((nxt + 1, store.set(nxt, value)), frozenset((nxt,)))

    def get(args):
        locs, heap = args
        if isinstance(heap, BotValue):
            return (VAL_BOT,)
        _, store = heap
        acc = VAL_BOT
        for loc in sorted(locs):
            if loc in store:
                acc = val_dom.join(acc, store[loc])
        return (acc,)

    def set_(args):
        locs, heap, value = args
        if isinstance(heap, BotValue):
            return (heap_dom.bot,)
        nxt, store = heap
        updated = {k: (val_dom.join(x, value) if k in locs else x) for k, x in store.items()}
        return ((nxt, FrozenMap(updated)),)

    def mkSt(args):
        return (tuple(args),)

    def splitSt(args):
        return tuple(args[0])

    def mkValSt(args):
        return (tuple(args),)

    def getValSt(args):
        return tuple(args[0])

    def mkOK(args):
        return ((Bool4.TT, args[0]),)

    def mkExc(args):
        return ((Bool4.FF, args[0]),)

    def isOK(args):
        flag, io = args[0]
        return (io,) if flag in (Bool4.TT, Bool4.TOP) else (io_dom.bot,)

    def isExc(args):
        flag, io = args[0]
        return (io,) if flag in (Bool4.FF, Bool4.TOP) else (io_dom.bot,)

    return {
        "litInt": litInt, "intVal": intVal, "boolVal": boolVal, "locVal": locVal,
        "isInt": isInt, "isBool": isBool, "isLoc": isLoc,
        "add": add, "eq": eq, "neg": neg, "read": read, "write": write, "id": ident,
        "isTrue": isTrue, "isFalse": isFalse,
        "in": infilter, "out": outfilter, "alloc": alloc, "get": get, "set": set_,
        "mkSt": mkSt, "splitSt": splitSt, "mkValSt": mkValSt, "getValSt": getValSt,
        "mkOK": mkOK, "mkExc": mkExc, "isOK": isOK, "isExc": isExc,
    }


def ext_while_language() -> LanguageDefinition:
    sorts = {s.name: s for s in (IDENT, LIT, EXPR, STAT, STATE, VAL, INT, BOOL,
                                 IN, OUT, HEAP, LOC, IOSTATE, VALIOSTATE, EXCIOSTATE)}
    constructors = {
        "const": ConstructorSignature("const", (LIT,), EXPR),
        "var": ConstructorSignature("var", (IDENT,), EXPR),
        "+": ConstructorSignature("+", (EXPR, EXPR), EXPR),
        "=": ConstructorSignature("=", (EXPR, EXPR), EXPR),
        "not": ConstructorSignature("not", (EXPR,), EXPR),
        "in": ConstructorSignature("in", (), EXPR),
        "ref": ConstructorSignature("ref", (EXPR,), EXPR),
        "!": ConstructorSignature("!", (EXPR,), EXPR),
        "skip": ConstructorSignature("skip", (), STAT),
        "throw": ConstructorSignature("throw", (), STAT),
        ":=": ConstructorSignature(":=", (IDENT, EXPR), STAT),
        ";": ConstructorSignature(";", (STAT, STAT), STAT),
        "if": ConstructorSignature("if", (EXPR, STAT, STAT), STAT),
        "while": ConstructorSignature("while", (EXPR, STAT), STAT),
        "out": ConstructorSignature("out", (EXPR,), STAT),
        "try": ConstructorSignature("try", (STAT, STAT), STAT),
        "<-": ConstructorSignature("<-", (EXPR, EXPR), STAT),
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
        "in": FilterSignature("in", (IN,), (VAL, IN)),
        "alloc": FilterSignature("alloc", (HEAP, VAL), (HEAP, LOC)),
        "locVal": FilterSignature("locVal", (LOC,), (VAL,)),
        "isLoc": FilterSignature("isLoc", (VAL,), (LOC,)),
        "get": FilterSignature("get", (LOC, HEAP), (VAL,)),
        "set": FilterSignature("set", (LOC, HEAP, VAL), (HEAP,)),
        "out": FilterSignature("out", (OUT, VAL), (OUT,)),
        "mkSt": FilterSignature("mkSt", (IN, OUT, STATE, HEAP), (IOSTATE,)),
        "splitSt": FilterSignature("splitSt", (IOSTATE,), (IN, OUT, STATE, HEAP)),
        "mkValSt": FilterSignature("mkValSt", (VAL, IOSTATE), (VALIOSTATE,)),
        "getValSt": FilterSignature("getValSt", (VALIOSTATE,), (VAL, IOSTATE)),
        "mkOK": FilterSignature("mkOK", (IOSTATE,), (EXCIOSTATE,)),
        "mkExc": FilterSignature("mkExc", (IOSTATE,), (EXCIOSTATE,)),
        "isOK": FilterSignature("isOK", (EXCIOSTATE,), (IOSTATE,)),
        "isExc": FilterSignature("isExc", (EXCIOSTATE,), (IOSTATE,)),
    }

    int_dom = IntervalDomain()
    bool_dom = Bool4Domain()
    loc_dom = FiniteSetDomain(make_concrete=Loc)
    val_dom = UnionValueDomain("Val", [
        ("int", int_dom, _is_int),
        ("bool", bool_dom, _is_bool),
        ("loc", loc_dom, _is_loc),
    ])
    state_dom = MapDomain("State", val_dom, tag="State", json_tag="state")
    in_dom = StreamDomain("In", val_dom, tag="In")
    out_dom = StreamDomain("Out", val_dom, tag="Out")
    heap_dom = HeapDomain(val_dom)
    io_dom = TupleDomain("IOState", [in_dom, out_dom, state_dom, heap_dom], "iostate")
    valio_dom = TupleDomain("ValIOState", [val_dom, io_dom], "valio")
    excio_dom = TupleDomain("ExcIOState", [bool_dom, io_dom], "excio")

    lits = [BaseTerm("lit", x) for x in (-1, 0, 1, 5)]
    idents = [BaseTerm("ident", x) for x in ("x", "y")]
    exprs = [Ctor("const", (lits[1],)), Ctor("var", (idents[0],)), Ctor("in", ())]
    stats = [Ctor("skip", ()), Ctor("throw", ())]
    domains = {
        "Int": int_dom, "Bool": bool_dom, "Loc": loc_dom, "Val": val_dom,
        "State": state_dom, "In": in_dom, "Out": out_dom, "Heap": heap_dom,
        "IOState": io_dom, "ValIOState": valio_dom, "ExcIOState": excio_dom,
        "lit": FlatTermDomain("lit", lits),
        "ident": FlatTermDomain("ident", idents),
        "expr": FlatTermDomain("expr", exprs),
        "stat": FlatTermDomain("stat", stats),
    }

    def _is_val(x):
        return _is_int(x) or _is_bool(x) or _is_loc(x)

    def _is_state(x):
        return isinstance(x, FrozenMap) and all(
            isinstance(k, str) and _is_val(y) for k, y in x.items())

    def _is_stream(x):
        return isinstance(x, tuple) and all(_is_val(y) for y in x)

    def _is_heap(x):
        return (isinstance(x, tuple) and len(x) == 2 and type(x[0]) is int
                and isinstance(x[1], FrozenMap)
                and all(type(k) is int and 0 <= k < x[0] and _is_val(y)
                        for k, y in x[1].items()))

    def _is_io(x):
        return (isinstance(x, tuple) and len(x) == 4 and _is_stream(x[0])
                and _is_stream(x[1]) and _is_state(x[2]) and _is_heap(x[3]))

    def _is_valio(x):
        return isinstance(x, tuple) and len(x) == 2 and _is_val(x[0]) and _is_io(x[1])

    def _is_excio(x):
        return isinstance(x, tuple) and len(x) == 2 and _is_bool(x[0]) and _is_io(x[1])

    value_sorts = {
        "Int": _is_int, "Bool": _is_bool, "Loc": _is_loc, "Val": _is_val,
        "State": _is_state, "In": _is_stream, "Out": _is_stream, "Heap": _is_heap,
        "IOState": _is_io, "ValIOState": _is_valio, "ExcIOState": _is_excio,
    }

    return LanguageDefinition(
        name="while-ext",
        sorts=sorts,
        constructors=constructors,
        filters=filters,
        skeletons=_skeletons(),
        flow_in={"expr": "IOState", "stat": "IOState"},
        flow_out={"expr": "ValIOState", "stat": "ExcIOState"},
        base_payloads={"lit": _is_int, "ident": lambda x: isinstance(x, str)},
        value_sorts=value_sorts,
        concrete_filters=_concrete_filters(),
        abstract_filters=_abstract_filters(domains),
        domains=domains,
    )


def parse_while_ext(source: str):
    return parse_program(source, ext=True)


def io_state(input=(), output=(), store=None, heap=None):
    """Concrete I/O state from plain pieces."""
    store = FrozenMap(store or {})
    if heap is None:
        heap = (0, FrozenMap())
    elif isinstance(heap[1], dict):
        heap = (heap[0], FrozenMap(heap[1]))
    return (tuple(input), tuple(output), store, heap)

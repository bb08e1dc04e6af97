"""Independent direct interpreters used as evaluation oracles.

Plain recursive evaluators over the AST, written without reference to
the skeleton engine so the two can check each other.
"""

from __future__ import annotations

from skelsem.fmap import FrozenMap
from skelsem.lang.while_ext import Loc
from skelsem.terms import Ctor


class Stuck(Exception):
    pass


class OutOfSteps(Exception):
    pass


class _Raised(Exception):
    def __init__(self, io):
        self.io = io


def _int(v):
    if type(v) is not int:
        raise Stuck("expected an integer")
    return v


def _bool(v):
    if type(v) is not bool:
        raise Stuck("expected a boolean")
    return v


# -- base While ---------------------------------------------------------------


def eval_expr(t: Ctor, env: FrozenMap):
    if t.name == "const":
        return t.args[0].payload
    if t.name == "var":
        name = t.args[0].payload
        if name not in env:
            raise Stuck(f"unbound {name}")
        return env[name]
    if t.name == "+":
        return _int(eval_expr(t.args[0], env)) + _int(eval_expr(t.args[1], env))
    if t.name == "=":
        return _int(eval_expr(t.args[0], env)) == _int(eval_expr(t.args[1], env))
    if t.name == "not":
        return not _bool(eval_expr(t.args[0], env))
    raise AssertionError(t.name)


def run_stmt(t: Ctor, env: FrozenMap, budget: int = 100000) -> FrozenMap:
    if budget <= 0:
        raise OutOfSteps
    if t.name == "skip":
        return env
    if t.name == ":=":
        return env.set(t.args[0].payload, eval_expr(t.args[1], env))
    if t.name == ";":
        return run_stmt(t.args[1], run_stmt(t.args[0], env, budget), budget)
    if t.name == "if":
        cond = _bool(eval_expr(t.args[0], env))
        return run_stmt(t.args[1] if cond else t.args[2], env, budget)
    if t.name == "while":
        steps = budget
        while True:
            steps -= 1
            if steps <= 0:
                raise OutOfSteps
            if not _bool(eval_expr(t.args[0], env)):
                return env
            env = run_stmt(t.args[1], env, steps)
    raise AssertionError(t.name)


# -- extended While -----------------------------------------------------------
# io = (input, output, store, heap); heap = (next, cells)


def eval_expr_ext(t: Ctor, io):
    inp, out, store, heap = io
    if t.name == "const":
        return t.args[0].payload, io
    if t.name == "var":
        name = t.args[0].payload
        if name not in store:
            raise Stuck(f"unbound {name}")
        return store[name], io
    if t.name == "in":
        if not inp:
            raise Stuck("empty input stream")
        return inp[0], (inp[1:], out, store, heap)
    if t.name == "+":
        v1, io = eval_expr_ext(t.args[0], io)
        v2, io = eval_expr_ext(t.args[1], io)
        return _int(v1) + _int(v2), io
    if t.name == "=":
        v1, io = eval_expr_ext(t.args[0], io)
        v2, io = eval_expr_ext(t.args[1], io)
        return _int(v1) == _int(v2), io
    if t.name == "not":
        v, io = eval_expr_ext(t.args[0], io)
        return not _bool(v), io
    if t.name == "ref":
        v, (inp, out, store, (nxt, cells)) = eval_expr_ext(t.args[0], io)
        return Loc(nxt), (inp, out, store, (nxt + 1, cells.set(nxt, v)))
    if t.name == "!":
        v, (inp, out, store, (nxt, cells)) = eval_expr_ext(t.args[0], io)
        if not isinstance(v, Loc):
            raise Stuck("not a location")
        if v.addr not in cells:
            raise Stuck("dangling location")
        return cells[v.addr], (inp, out, store, (nxt, cells))
    raise AssertionError(t.name)


def run_stmt_ext(t: Ctor, io, budget: int = 100000):
    """(ok, io') pairs; exceptions are signalled, not stuck."""
    try:
        return True, _run_ext(t, io, budget)
    except _Raised as e:
        return False, e.io


def _run_ext(t: Ctor, io, budget: int):
    if budget <= 0:
        raise OutOfSteps
    if t.name == "skip":
        return io
    if t.name == "throw":
        raise _Raised(io)
    if t.name == ":=":
        v, (inp, out, store, heap) = eval_expr_ext(t.args[1], io)
        return (inp, out, store.set(t.args[0].payload, v), heap)
    if t.name == ";":
        return _run_ext(t.args[1], _run_ext(t.args[0], io, budget), budget)
    if t.name == "out":
        v, (inp, out, store, heap) = eval_expr_ext(t.args[0], io)
        return (inp, out + (v,), store, heap)
    if t.name == "try":
        try:
            return _run_ext(t.args[0], io, budget)
        except _Raised as e:
            return _run_ext(t.args[1], e.io, budget)
    if t.name == "if":
        v, io = eval_expr_ext(t.args[0], io)
        return _run_ext(t.args[1] if _bool(v) else t.args[2], io, budget)
    if t.name == "while":
        steps = budget
        while True:
            steps -= 1
            if steps <= 0:
                raise OutOfSteps
            v, io = eval_expr_ext(t.args[0], io)
            if not _bool(v):
                return io
            io = _run_ext(t.args[1], io, steps)
    if t.name == "<-":
        v1, io = eval_expr_ext(t.args[0], io)
        if not isinstance(v1, Loc):
            raise Stuck("not a location")
        v2, (inp, out, store, (nxt, cells)) = eval_expr_ext(t.args[1], io)
        if v1.addr not in cells:
            raise Stuck("dangling location")
        return (inp, out, store, (nxt, cells.set(v1.addr, v2)))
    raise AssertionError(t.name)

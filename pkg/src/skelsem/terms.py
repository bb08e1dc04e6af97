"""Sorts, signatures, and the term syntax given meaning by skeletons.

A term is a base literal, a term variable, or a constructor applied to
terms.  Sorts come in three kinds: base sorts classify literals, program
sorts classify constructor-built terms, and flow sorts classify the
semantic values threaded through interpretations.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Union

from .errors import PathIntoLeaf, PathOutOfRange, SortMismatch, UnknownConstructor, UnknownVariable


class SortKind(Enum):
    BASE = "base"
    PROGRAM = "program"
    FLOW = "flow"


@dataclass(frozen=True)
class Sort:
    kind: SortKind
    name: str

    def __repr__(self):
        return f"{self.name}:{self.kind.value}"


def base_sort(name: str) -> Sort:
    return Sort(SortKind.BASE, name)


def program_sort(name: str) -> Sort:
    return Sort(SortKind.PROGRAM, name)


def flow_sort(name: str) -> Sort:
    return Sort(SortKind.FLOW, name)


@dataclass(frozen=True)
class ConstructorSignature:
    name: str
    arg_sorts: tuple[Sort, ...]
    result_sort: Sort

    @property
    def arity(self) -> int:
        return len(self.arg_sorts)


@dataclass(frozen=True)
class FilterSignature:
    """Filter sort: input sorts to output sorts; no outputs = predicate."""

    name: str
    in_sorts: tuple[Sort, ...]
    out_sorts: tuple[Sort, ...]


@dataclass(frozen=True)
class BaseTerm:
    """Literal leaf; the payload is opaque to the meta-language."""

    sort: str
    payload: Any

    def __repr__(self):
        return f"{self.sort}({self.payload!r})"


@dataclass(frozen=True)
class TermVar:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Ctor:
    name: str
    args: tuple["Term", ...]

    def __repr__(self):
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(map(repr, self.args))})"


Term = Union[BaseTerm, TermVar, Ctor]

ProgramPoint = tuple[int, ...]
ROOT_POINT: ProgramPoint = ()


def ctor(name: str, *args: Term) -> Ctor:
    return Ctor(name, tuple(args))


def term_vars(t: Term) -> frozenset[str]:
    """Set of term-variable names occurring anywhere in `t`."""
    if isinstance(t, TermVar):
        return frozenset((t.name,))
    if isinstance(t, Ctor):
        out: frozenset[str] = frozenset()
        for a in t.args:
            out |= term_vars(a)
        return out
    return frozenset()


def is_closed(t: Term) -> bool:
    return not term_vars(t)


def sort_of(lang, gamma: Mapping[str, Sort], t: Term) -> Sort:
    """Sort of `t` under the sorting environment `gamma`.

    Base terms carry their own base sort; variables are looked up in
    `gamma`; a constructor application has its signature's result sort,
    provided each argument matches the corresponding signature slot.
    """
    if isinstance(t, BaseTerm):
        if t.sort not in lang.sorts or lang.sorts[t.sort].kind is not SortKind.BASE:
            raise SortMismatch(f"unknown base sort {t.sort!r}")
        return lang.sorts[t.sort]
    if isinstance(t, TermVar):
        try:
            return gamma[t.name]
        except KeyError:
            raise UnknownVariable(f"term variable {t.name!r} not in scope") from None
    sig = lang.constructors.get(t.name)
    if sig is None:
        raise UnknownConstructor(f"constructor {t.name!r} not declared")
    if len(t.args) != sig.arity:
        raise SortMismatch(f"{t.name!r} expects {sig.arity} arguments, got {len(t.args)}")
    for i, (arg, expect) in enumerate(zip(t.args, sig.arg_sorts), start=1):
        found = sort_of(lang, gamma, arg)
        if found != expect:
            raise SortMismatch(
                f"argument {i} of {t.name!r} has sort {found.name}, expected {expect.name}",
                position=i,
                expected=expect,
                found=found,
            )
    return sig.result_sort


def substitute(env: Mapping[str, Term], t: Term) -> Term:
    """Homomorphic replacement of term variables by terms."""
    if isinstance(t, BaseTerm):
        return t
    if isinstance(t, TermVar):
        try:
            return env[t.name]
        except KeyError:
            raise UnknownVariable(f"no binding for term variable {t.name!r}") from None
    return Ctor(t.name, tuple(substitute(env, a) for a in t.args))


def subterm_at(t: Term, pp: ProgramPoint) -> Term:
    """Subterm addressed by the program point `pp` (1-indexed children)."""
    cur = t
    for depth, k in enumerate(pp):
        if not isinstance(cur, Ctor) or not cur.args:
            raise PathIntoLeaf(f"point {pp} descends into a leaf at depth {depth}")
        if not 1 <= k <= len(cur.args):
            raise PathOutOfRange(f"point {pp}: index {k} out of range for {cur.name!r}")
        cur = cur.args[k - 1]
    return cur

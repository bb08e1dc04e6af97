"""Flow-sensitive constraint generation over program points, plus a
widening worklist solver.

Program points are integer paths addressing the executable (constructor-
headed) subterms of a closed program.  Each point contributes sort
declarations for its state and result variables, bindings for its
parameter variables, and the constraints read off its skeleton: hooks
link a point's variables to the hooked point's state and result, filters
become symbolic applications of their abstract counterpart, and branch
sets contribute the union of their branches' constraints.

A solution maps constraint variables to abstract values (and terms) such
that every constraint holds, with filter applications read as
"out ⊒ filter(in)".  Solutions induce a judgement set that the abstract
invariant checker certifies.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Union

from .abstract import check_invariant
from .errors import (
    DfvarViolation,
    InvariantCheckFailed,
    SolutionCheckFailed,
    UndefinedHookPoint,
)
from .fmap import FrozenMap
from .language import LanguageDefinition, lookup_skeleton
from .skeletons import Filter, Hook, X_IN, X_OUT
from .terms import Ctor, ProgramPoint, SortKind, Term, TermVar, subterm_at, substitute
from .wf import collect_var_sorts


def point_text(pp: ProgramPoint) -> str:
    return "r" + "".join(f".{k}" for k in pp)


def parse_point(text: str) -> ProgramPoint:
    if text == "r":
        return ()
    parts = text.split(".")
    if parts[0] != "r":
        raise ValueError(f"bad program point {text!r}")
    return tuple(int(p) for p in parts[1:])


@dataclass(frozen=True)
class ConstraintVar:
    pp: ProgramPoint
    var: str

    @property
    def text(self) -> str:
        return f"{point_text(self.pp)}#{self.var.replace(chr(39), 'p')}"

    def __repr__(self):
        return self.text


def parse_cvar(text: str) -> ConstraintVar:
    pp_part, var = text.split("#", 1)
    return ConstraintVar(parse_point(pp_part), var)


@dataclass(frozen=True)
class Eq:
    a: ConstraintVar
    b: ConstraintVar


@dataclass(frozen=True)
class Leq:
    lo: ConstraintVar
    hi: ConstraintVar


@dataclass(frozen=True)
class SortIs:
    var: ConstraintVar
    sort: str


@dataclass(frozen=True)
class EqTerm:
    var: ConstraintVar
    term: Term


@dataclass(frozen=True)
class FilterApp:
    name: str
    ins: tuple[ConstraintVar, ...]
    outs: tuple[ConstraintVar, ...]


Constraint = Union[Eq, Leq, SortIs, EqTerm, FilterApp]


@dataclass
class ConstraintSet:
    constraints: tuple[Constraint, ...]
    var_sorts: dict[ConstraintVar, str]
    dfvar: dict[ProgramPoint, frozenset]

    def __iter__(self):
        return iter(self.constraints)


def gen_points(lang: LanguageDefinition, t0: Term) -> frozenset[ProgramPoint]:
    """All points addressing constructor-headed (executable) subterms."""
    points = set()

    def walk(t: Term, pp: ProgramPoint):
        if not isinstance(t, Ctor):
            return
        points.add(pp)
        for k, arg in enumerate(t.args, start=1):
            walk(arg, pp + (k,))

    walk(t0, ())
    return frozenset(points)


def hook_point(lang: LanguageDefinition, pp: ProgramPoint, skel, hook_term: Term,
               t0: Term, points: frozenset | None = None) -> ProgramPoint:
    """Program point a hook's term executes at.

    Hooks on a bare parameter go to the corresponding child point; a
    hook on the skeleton's own constructor applied to its parameters
    recurses at the same point.  Any other hook shape is located by
    substitution and exact search.
    """
    if points is None:
        points = gen_points(lang, t0)
    sub = subterm_at(t0, pp)
    if isinstance(hook_term, TermVar):
        idx = skel.params.index(hook_term.name) + 1
        target = pp + (idx,)
        if target not in points:
            raise UndefinedHookPoint(f"child {idx} of {point_text(pp)} is not executable")
        return target
    if hook_term == Ctor(skel.ctor, tuple(TermVar(p) for p in skel.params)):
        return pp
    target_term = substitute(dict(zip(skel.params, sub.args)), hook_term)
    matches = [p for p in sorted(points) if subterm_at(t0, p) == target_term]
    if not matches:
        raise UndefinedHookPoint(f"hook term does not occur at any generated point: {hook_term!r}")
    if len(matches) > 1:
        raise UndefinedHookPoint(f"hook term occurs at several points: {matches}")
    return matches[0]


def generate(lang: LanguageDefinition, t0: Term) -> ConstraintSet:
    """Constraints for every executable point of the closed program `t0`."""
    points = gen_points(lang, t0)
    constraints: list[Constraint] = []
    seen = set()
    var_sorts: dict[ConstraintVar, str] = {}
    dfvar: dict[ProgramPoint, frozenset] = {}

    def add(c: Constraint):
        if c not in seen:
            seen.add(c)
            constraints.append(c)

    def declare(cv: ConstraintVar, sort_name: str):
        var_sorts[cv] = sort_name
        add(SortIs(cv, sort_name))

    for pp in sorted(points):
        sub = subterm_at(t0, pp)
        skel = lookup_skeleton(lang, sub.name)
        sig = lang.constructors[sub.name]
        s = sig.result_sort
        declare(ConstraintVar(pp, X_IN.name), lang.flow_in[s.name])
        declare(ConstraintVar(pp, X_OUT.name), lang.flow_out[s.name])
        for param, arg, arg_sort in zip(skel.params, sub.args, sig.arg_sorts):
            cv = ConstraintVar(pp, param)
            declare(cv, arg_sort.name)
            add(EqTerm(cv, arg))

        var_sorts_sk = collect_var_sorts(lang, skel)
        defined = {X_IN.name, *skel.params}

        def emit(body, defined: set) -> set:
            defined = set(defined)
            for bone in body.bones:
                if isinstance(bone, Hook):
                    if bone.in_var.name not in defined:
                        raise DfvarViolation(
                            f"{point_text(pp)}: hook input {bone.in_var.name} not yet defined")
                    target = hook_point(lang, pp, skel, bone.term, t0, points)
                    add(Leq(ConstraintVar(pp, bone.in_var.name),
                            ConstraintVar(target, X_IN.name)))
                    add(Leq(ConstraintVar(target, X_OUT.name),
                            ConstraintVar(pp, bone.out_var.name)))
                    declare(ConstraintVar(pp, bone.out_var.name),
                            var_sorts_sk[bone.out_var].name)
                    defined.add(bone.out_var.name)
                elif isinstance(bone, Filter):
                    missing = [v.name for v in bone.in_vars if v.name not in defined]
                    if missing:
                        raise DfvarViolation(
                            f"{point_text(pp)}: filter {bone.name!r} uses undefined {missing}")
                    fsig = lang.filters[bone.name]
                    for v, out_sort in zip(bone.out_vars, fsig.out_sorts):
                        declare(ConstraintVar(pp, v.name), out_sort.name)
                    add(FilterApp(bone.name,
                                  tuple(ConstraintVar(pp, v.name) for v in bone.in_vars),
                                  tuple(ConstraintVar(pp, v.name) for v in bone.out_vars)))
                    defined.update(v.name for v in bone.out_vars)
                else:
                    branch_defined = [emit(sub_body, defined) for sub_body in bone.branches]
                    for k, bd in enumerate(branch_defined, start=1):
                        missing = [v.name for v in bone.shared if v.name not in bd]
                        if missing:
                            raise DfvarViolation(
                                f"{point_text(pp)}: branch {k} does not define {missing}")
                    defined.update(v.name for v in bone.shared)
            return defined

        final = emit(skel.body, defined)
        if X_OUT.name not in final:
            raise DfvarViolation(f"{point_text(pp)}: x_o never defined")
        dfvar[pp] = frozenset(final)

    return ConstraintSet(tuple(constraints), var_sorts, dfvar)


@dataclass
class Solution:
    values: FrozenMap  # ConstraintVar -> abstract value or term

    def __getitem__(self, cv: ConstraintVar):
        return self.values[cv]

    def at(self, pp: ProgramPoint, var: str):
        return self.values[ConstraintVar(pp, var)]


def _term_value_sorts(lang):
    return {name for name, s in lang.sorts.items() if s.kind is not SortKind.FLOW}


def verify_solution(lang: LanguageDefinition, cset: ConstraintSet, sol: Solution) -> list:
    """Constraints violated by `sol` (empty list = genuine solution)."""
    bad = []
    for c in cset.constraints:
        if isinstance(c, SortIs):
            if not lang.domains[c.sort].validate(sol[c.var]):
                bad.append(c)
        elif isinstance(c, EqTerm):
            if sol[c.var] != c.term:
                bad.append(c)
        elif isinstance(c, Eq):
            if sol[c.a] != sol[c.b]:
                bad.append(c)
        elif isinstance(c, Leq):
            dom = lang.domains[cset.var_sorts[c.hi]]
            if not dom.leq(sol[c.lo], sol[c.hi]):
                bad.append(c)
        elif isinstance(c, FilterApp):
            result = lang.abstract_filters[c.name](tuple(sol[v] for v in c.ins))
            if result is None:
                continue
            doms = [lang.domains[cset.var_sorts[v]] for v in c.outs]
            if not all(d.leq(r, sol[v]) for d, r, v in zip(doms, result, c.outs)):
                bad.append(c)
    return bad


def solve(lang: LanguageDefinition, cset: ConstraintSet, widen_after: int = 3,
          seeds: dict | None = None) -> Solution:
    """Chaotic worklist iteration with per-variable widening.

    Every variable starts at its sort's bottom (terms at their bound
    term); propagation joins values upward along the constraints, and
    after a variable changes `widen_after` times further changes widen
    instead of join, so iteration always terminates.  The result is
    verified against every constraint before it is returned.
    """
    values: dict[ConstraintVar, object] = {}
    for cv, sort_name in cset.var_sorts.items():
        values[cv] = lang.domains[sort_name].bot
    for c in cset.constraints:
        if isinstance(c, EqTerm):
            values[c.var] = c.term

    for key, val in (seeds or {}).items():
        cv = parse_cvar(key) if isinstance(key, str) else key
        if cv not in cset.var_sorts:
            raise SolutionCheckFailed(f"seed names an undeclared variable {cv.text}")
        dom = lang.domains[cset.var_sorts[cv]]
        values[cv] = dom.join(values[cv], val)

    watchers: dict[ConstraintVar, list[int]] = defaultdict(list)
    propagating = []
    for c in cset.constraints:
        if isinstance(c, (Leq, Eq, FilterApp)):
            idx = len(propagating)
            propagating.append(c)
            ins = (c.lo,) if isinstance(c, Leq) else (c.a, c.b) if isinstance(c, Eq) else c.ins
            for v in ins:
                watchers[v].append(idx)

    queue = deque(range(len(propagating)))
    queued = set(queue)
    counts: dict[ConstraintVar, int] = defaultdict(int)

    def push(cv: ConstraintVar, new):
        dom = lang.domains[cset.var_sorts[cv]]
        old = values[cv]
        joined = dom.join(old, new)
        if joined == old:
            return
        counts[cv] += 1
        if counts[cv] > widen_after:
            joined = dom.widen(old, joined)
        values[cv] = joined
        for idx in watchers[cv]:
            if idx not in queued:
                queued.add(idx)
                queue.append(idx)

    while queue:
        idx = queue.popleft()
        queued.discard(idx)
        c = propagating[idx]
        if isinstance(c, Leq):
            push(c.hi, values[c.lo])
        elif isinstance(c, Eq):
            push(c.b, values[c.a])
            push(c.a, values[c.b])
        else:
            result = lang.abstract_filters[c.name](tuple(values[v] for v in c.ins))
            if result is not None:
                for v, r in zip(c.outs, result):
                    push(v, r)

    sol = Solution(FrozenMap(values))
    bad = verify_solution(lang, cset, sol)
    if bad:
        raise SolutionCheckFailed(f"{len(bad)} constraints unsatisfied, first: {bad[0]!r}")
    return sol


def solution_to_triples(lang: LanguageDefinition, sol: Solution, t0: Term) -> frozenset:
    """Judgement set induced by a solution, certified by the invariant
    checker before it is returned."""
    triples = set()
    for pp in sorted(gen_points(lang, t0)):
        triples.add((sol.at(pp, X_IN.name), subterm_at(t0, pp), sol.at(pp, X_OUT.name)))
    report = check_invariant(lang, triples, use_splitting=False)
    if not report.ok:
        raise InvariantCheckFailed(
            f"solution-induced judgement set fails the invariant check: {report.failures[:3]}")
    return frozenset(triples)

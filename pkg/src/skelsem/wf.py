"""Well-formedness interpretation.

Checks every skeleton for define-before-use, freshness of definitions,
branch sharing, and sort consistency.  The state is a sorting
environment Γ plus the set D of variables defined so far; dom(Γ) ⊆ D
throughout, and branch-local variables outside the shared set end up in
D but not in Γ, so they can be neither used nor redefined later.

One symbolic run per skeleton suffices for all closed instantiations,
because sorts are preserved under sort-respecting substitution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .driver import BranchOutcomes, Interpretation
from .errors import SkelsemError, SortMismatch, UnknownConstructor, UnknownVariable
from .fmap import FrozenMap
from .language import LanguageDefinition
from .skeletons import Branches, Filter, Hook, Skeleton, SkeletonBody, X_IN, X_OUT
from .terms import Sort, SortKind, TermVar, sort_of, term_vars

USE_BEFORE_DEF = "UseBeforeDef"
REDEFINITION = "Redefinition"
SORT_CLASH = "SortClash"
BRANCH_SHARE_MISMATCH = "BranchShareMismatch"
OUTPUT_SORT_MISMATCH = "OutputSortMismatch"
BRANCH_COUNT_BELOW_TWO = "BranchCountBelowTwo"


@dataclass(frozen=True)
class WfState:
    gamma: FrozenMap  # SkeletalVar -> Sort
    defined: frozenset


class WfViolation(SkelsemError):
    def __init__(self, reason: str, detail: str):
        super().__init__(f"{reason}: {detail}")
        self.reason = reason
        self.detail = detail


def _kind_ok(var, sort: Sort) -> bool:
    if isinstance(var, TermVar):
        return sort.kind in (SortKind.BASE, SortKind.PROGRAM)
    return sort.kind is SortKind.FLOW


def _term_gamma(state: WfState) -> dict[str, Sort]:
    return {v.name: s for v, s in state.gamma.items() if isinstance(v, TermVar)}


def _hook_rule(lang: LanguageDefinition, state: WfState, in_var, term, out_var) -> WfState:
    if in_var not in state.gamma:
        raise WfViolation(USE_BEFORE_DEF, f"hook input {in_var.name} undefined")
    missing = term_vars(term) - {v.name for v in state.gamma if isinstance(v, TermVar)}
    if missing:
        raise WfViolation(USE_BEFORE_DEF, f"hook term uses unbound {sorted(missing)}")
    try:
        t_sort = sort_of(lang, _term_gamma(state), term)
    except (SortMismatch, UnknownConstructor, UnknownVariable) as e:
        raise WfViolation(SORT_CLASH, f"hook term ill-sorted: {e}") from None
    if t_sort.kind is not SortKind.PROGRAM or t_sort.name not in lang.flow_in:
        raise WfViolation(SORT_CLASH, f"hook term has non-program sort {t_sort.name}")
    if state.gamma[in_var] != lang.in_sort(t_sort):
        raise WfViolation(
            SORT_CLASH,
            f"hook input {in_var.name} has sort {state.gamma[in_var].name},"
            f" expected {lang.in_sort(t_sort).name}")
    if out_var in state.defined:
        raise WfViolation(REDEFINITION, f"hook output {out_var.name} already defined")
    out_sort = lang.out_sort(t_sort)
    return WfState(state.gamma.set(out_var, out_sort), state.defined | {out_var})


def _filter_rule(lang: LanguageDefinition, state: WfState, name, in_vars, out_vars) -> WfState:
    sig = lang.filters.get(name)
    if sig is None:
        raise WfViolation(SORT_CLASH, f"filter {name!r} has no signature")
    for v in in_vars:
        if v not in state.gamma:
            raise WfViolation(USE_BEFORE_DEF, f"filter {name!r} input {v.name} undefined")
    if len(in_vars) != len(sig.in_sorts) or len(out_vars) != len(sig.out_sorts):
        raise WfViolation(SORT_CLASH, f"filter {name!r} arity does not match its signature")
    for v, expect in zip(in_vars, sig.in_sorts):
        found = state.gamma[v]
        if found != expect or not _kind_ok(v, expect):
            raise WfViolation(
                SORT_CLASH, f"filter {name!r} input {v.name}: {found.name} vs {expect.name}")
    if len(set(out_vars)) != len(out_vars):
        raise WfViolation(REDEFINITION, f"filter {name!r} output variables not distinct")
    clash = [v for v in out_vars if v in state.defined]
    if clash:
        raise WfViolation(REDEFINITION, f"filter {name!r} redefines {[v.name for v in clash]}")
    for v, s in zip(out_vars, sig.out_sorts):
        if not _kind_ok(v, s):
            raise WfViolation(SORT_CLASH, f"filter {name!r} output {v.name} kind-mismatches {s.name}")
    gamma = state.gamma.update(zip(out_vars, sig.out_sorts))
    return WfState(gamma, state.defined | set(out_vars))


def _merge_rule(state: WfState, shared, branch_states: list[WfState]) -> WfState:
    n = len(branch_states)
    if n < 2:
        raise WfViolation(BRANCH_COUNT_BELOW_TWO, f"{n} branch(es); at least 2 required")
    fresh = [st.defined - state.defined for st in branch_states]
    for i in range(n):
        for j in range(i + 1, n):
            if fresh[i] & fresh[j] != shared:
                raise WfViolation(
                    BRANCH_SHARE_MISMATCH,
                    f"branches {i + 1}/{j + 1} share "
                    f"{sorted(v.name for v in fresh[i] & fresh[j])}, "
                    f"declared {sorted(v.name for v in shared)}")
    restricted = []
    for st in branch_states:
        restricted.append({v: st.gamma[v] for v in shared if v in st.gamma})
    for other in restricted[1:]:
        if other != restricted[0]:
            raise WfViolation(BRANCH_SHARE_MISMATCH, "branch sorts disagree on shared variables")
    gamma = state.gamma.update(restricted[0].items())
    defined = state.defined
    for st in branch_states:
        defined |= st.defined
    return WfState(gamma, defined)


class WfRules(Interpretation):
    """Well-formedness rules packaged for the generic driver.

    Rule failures produce empty successor sets; use `check_skeleton` for
    positioned diagnostics.
    """

    def __init__(self, lang: LanguageDefinition):
        self.lang = lang

    def nil(self, state):
        return (state,)

    def hook(self, state, in_var, term, out_var):
        try:
            return (_hook_rule(self.lang, state, in_var, term, out_var),)
        except WfViolation:
            return ()

    def filter(self, state, name, in_vars, out_vars):
        try:
            return (_filter_rule(self.lang, state, name, in_vars, out_vars),)
        except WfViolation:
            return ()

    def merge(self, shared, outcomes: BranchOutcomes, state):
        if not outcomes.is_total():
            return ()
        try:
            return (_merge_rule(state, shared, [outcomes[i] for i in range(1, outcomes.n + 1)]),)
        except WfViolation:
            return ()


def wf_rules(lang: LanguageDefinition) -> WfRules:
    return WfRules(lang)


@dataclass
class WfSkeletonReport:
    skeleton: str
    failures: list[tuple[str, str, str]] = field(default_factory=list)  # (bone path, reason, detail)

    @property
    def ok(self) -> bool:
        return not self.failures

    def first(self):
        return self.failures[0] if self.failures else None


@dataclass
class WfReport:
    per_skeleton: list[WfSkeletonReport]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.per_skeleton)


class _Positioned(SkelsemError):
    def __init__(self, path: tuple, violation: WfViolation):
        super().__init__(str(violation))
        self.path = path
        self.violation = violation


def _path_str(path: tuple) -> str:
    return ".".join(str(p) for p in path) if path else "end"


def _check_body(lang, state: WfState, body: SkeletonBody, path: tuple) -> WfState:
    for i, bone in enumerate(body.bones, start=1):
        here = path + (i,)
        try:
            if isinstance(bone, Hook):
                state = _hook_rule(lang, state, bone.in_var, bone.term, bone.out_var)
            elif isinstance(bone, Filter):
                state = _filter_rule(lang, state, bone.name, bone.in_vars, bone.out_vars)
            elif isinstance(bone, Branches):
                branch_states = []
                for j, sub in enumerate(bone.branches, start=1):
                    branch_states.append(_check_body(lang, state, sub, here + (j,)))
                state = _merge_rule(state, bone.shared, branch_states)
        except WfViolation as v:
            raise _Positioned(here, v) from None
    return state


def check_skeleton(lang: LanguageDefinition, skel: Skeleton) -> WfSkeletonReport:
    """Check one skeleton symbolically from its signature's initial Γ."""
    report = WfSkeletonReport(skel.name)
    sig = lang.constructors.get(skel.ctor)
    if sig is None:
        report.failures.append(("init", SORT_CLASH, f"undeclared constructor {skel.ctor!r}"))
        return report
    gamma = {X_IN: lang.in_sort(sig.result_sort)}
    for p, s in zip(skel.params, sig.arg_sorts):
        gamma[TermVar(p)] = s
    state = WfState(FrozenMap(gamma), frozenset(gamma))
    try:
        final = _check_body(lang, state, skel.body, ())
    except _Positioned as e:
        report.failures.append((_path_str(e.path), e.violation.reason, e.violation.detail))
        return report
    want = lang.out_sort(sig.result_sort)
    got = final.gamma.get(X_OUT)
    if got != want:
        detail = "x_o never defined" if got is None else f"x_o has sort {got.name}, expected {want.name}"
        report.failures.append(("end", OUTPUT_SORT_MISMATCH, detail))
    return report


def check_language(lang: LanguageDefinition) -> WfReport:
    return WfReport([check_skeleton(lang, sk) for sk in lang.skeletons])


def collect_var_sorts(lang: LanguageDefinition, skel: Skeleton) -> dict:
    """Sort of every skeletal variable a skeleton defines, branch-local
    ones included.  Requires a WF-checked language, where each variable
    is defined exactly once across the whole skeleton."""
    sig = lang.constructors[skel.ctor]
    init = {X_IN: lang.in_sort(sig.result_sort)}
    for p, s in zip(skel.params, sig.arg_sorts):
        init[TermVar(p)] = s
    collected = dict(init)

    def walk(body: SkeletonBody, gamma: dict) -> dict:
        g = dict(gamma)
        for bone in body.bones:
            if isinstance(bone, Hook):
                tg = {v.name: s for v, s in g.items() if isinstance(v, TermVar)}
                t_sort = sort_of(lang, tg, bone.term)
                g[bone.out_var] = lang.out_sort(t_sort)
                collected[bone.out_var] = g[bone.out_var]
            elif isinstance(bone, Filter):
                fsig = lang.filters[bone.name]
                for v, s in zip(bone.out_vars, fsig.out_sorts):
                    g[v] = s
                    collected[v] = s
            elif isinstance(bone, Branches):
                for sub in bone.branches:
                    walk(sub, g)
                for v in bone.shared:
                    g[v] = collected[v]
        return g

    walk(skel.body, init)
    return collected

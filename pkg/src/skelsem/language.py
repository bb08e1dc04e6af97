"""Language definitions: everything a language pack registers.

A pack bundles sorts, constructor and filter signatures, the skeletons,
the in/out flow-sort maps, and the concrete and abstract instantiations
of its filters and domains.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable

from .errors import ArityMismatch, UnknownConstructor, UnknownFilter
from .skeletons import Branches, Filter, Skeleton
from .terms import ConstructorSignature, FilterSignature, Sort, SortKind


ConcreteFilter = Callable[[tuple], Iterable[tuple]]
AbstractFilter = Callable[[tuple], "tuple | None"]


@dataclass
class LanguageDefinition:
    name: str
    sorts: dict[str, Sort]
    constructors: dict[str, ConstructorSignature]
    filters: dict[str, FilterSignature]
    skeletons: tuple[Skeleton, ...]
    flow_in: dict[str, str]  # program sort name -> flow sort name
    flow_out: dict[str, str]
    # payload and value classifiers, keyed by sort name
    base_payloads: dict[str, Callable[[Any], bool]] = field(default_factory=dict)
    value_sorts: dict[str, Callable[[Any], bool]] = field(default_factory=dict)
    # concrete and abstract instantiations
    concrete_filters: dict[str, ConcreteFilter] = field(default_factory=dict)
    abstract_filters: dict[str, AbstractFilter] = field(default_factory=dict)
    domains: dict[str, Any] = field(default_factory=dict)  # sort name -> AbstractDomain

    def __post_init__(self):
        self._by_ctor: dict[str, list[Skeleton]] = {}
        for sk in self.skeletons:
            self._by_ctor.setdefault(sk.ctor, []).append(sk)

    def lookup_skeleton(self, ctor_name: str) -> Skeleton:
        found = self._by_ctor.get(ctor_name, [])
        if not found:
            raise UnknownConstructor(f"no skeleton for constructor {ctor_name!r}")
        return found[0]

    def in_sort(self, program_sort: Sort) -> Sort:
        return self.sorts[self.flow_in[program_sort.name]]

    def out_sort(self, program_sort: Sort) -> Sort:
        return self.sorts[self.flow_out[program_sort.name]]

    def domain(self, sort_name: str):
        return self.domains[sort_name]

    def apply_concrete_filter(self, name: str, args) -> list[tuple]:
        """Concrete filter relation at `args`; empty list = does not apply."""
        self._filter_sig(name, args)
        return [tuple(out) for out in self.concrete_filters[name](tuple(args))]

    def apply_abstract_filter(self, name: str, args):
        """Abstract filter at `args`; None = the ⊥ result."""
        self._filter_sig(name, args)
        return self.abstract_filters[name](tuple(args))

    def _filter_sig(self, name: str, args):
        sig = self.filters.get(name)
        if sig is None:
            raise UnknownFilter(f"no filter named {name!r}")
        if len(args) != len(sig.in_sorts):
            raise ArityMismatch(
                f"filter {name!r} takes {len(sig.in_sorts)} arguments, got {len(args)}")
        return sig

    def with_abstract_filter(self, name: str, fn: AbstractFilter) -> "LanguageDefinition":
        """Copy of the pack with one abstract filter swapped (for mutation tests)."""
        table = dict(self.abstract_filters)
        table[name] = fn
        return replace(self, abstract_filters=table)


def lookup_skeleton(lang: LanguageDefinition, ctor_name: str) -> Skeleton:
    if ctor_name not in lang.constructors:
        raise UnknownConstructor(f"constructor {ctor_name!r} not declared")
    return lang.lookup_skeleton(ctor_name)


@dataclass
class ValidationReport:
    findings: list[tuple[str, str]] = field(default_factory=list)

    def add(self, code: str, subject: str):
        self.findings.append((code, subject))

    @property
    def ok(self) -> bool:
        return not self.findings

    def codes(self) -> set[str]:
        return {c for c, _ in self.findings}

    def __repr__(self):
        if self.ok:
            return "ValidationReport(ok)"
        return "ValidationReport(%s)" % ", ".join(f"{c}({s})" for c, s in self.findings)


def _filters_used(skel: Skeleton) -> set[str]:
    names: set[str] = set()

    def walk(body):
        for bone in body.bones:
            if isinstance(bone, Filter):
                names.add(bone.name)
            elif isinstance(bone, Branches):
                for sub in bone.branches:
                    walk(sub)

    walk(skel.body)
    return names


def validate_language(lang: LanguageDefinition) -> ValidationReport:
    """Structural audit of a pack; findings are collected, not raised."""
    report = ValidationReport()

    for name, sig in lang.constructors.items():
        if sig.result_sort.kind is not SortKind.PROGRAM:
            report.add("NonProgramResult", name)
        for s in (*sig.arg_sorts, sig.result_sort):
            if lang.sorts.get(s.name) != s:
                report.add("UnknownSort", f"{name}:{s.name}")

    seen: dict[str, int] = {}
    for sk in lang.skeletons:
        seen[sk.ctor] = seen.get(sk.ctor, 0) + 1
        if sk.ctor not in lang.constructors:
            report.add("SkeletonForUndeclared", sk.ctor)
            continue
        sig = lang.constructors[sk.ctor]
        if len(sk.params) != sig.arity:
            report.add("ParamArityMismatch", sk.ctor)
        if len(set(sk.params)) != len(sk.params):
            report.add("DuplicateParams", sk.ctor)
    for ctor_name, n in seen.items():
        if n > 1:
            report.add("DuplicateSkeleton", ctor_name)
    for ctor_name in lang.constructors:
        if ctor_name not in seen:
            report.add("MissingSkeleton", ctor_name)

    for sk in lang.skeletons:
        for fname in sorted(_filters_used(sk)):
            if fname not in lang.filters:
                report.add("FilterWithoutSignature", fname)
            if fname not in lang.concrete_filters:
                report.add("FilterWithoutConcrete", fname)
            if fname not in lang.abstract_filters:
                report.add("FilterWithoutAbstract", fname)

    program_sorts = [s for s in lang.sorts.values() if s.kind is SortKind.PROGRAM]
    for s in program_sorts:
        if s.name not in lang.flow_in or lang.flow_in[s.name] not in lang.sorts:
            report.add("MissingInFlowSort", s.name)
        if s.name not in lang.flow_out or lang.flow_out[s.name] not in lang.sorts:
            report.add("MissingOutFlowSort", s.name)

    names = [s.name for s in lang.sorts.values()]
    if len(set(names)) != len(names):
        report.add("DuplicateSortName", lang.name)

    return report

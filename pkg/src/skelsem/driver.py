"""Generic interpretation driver.

An interpretation supplies four rules: the meaning of an empty body, of
a hook, of a filter, and of merging branch outcomes.  The driver derives
the meaning of whole skeleton bodies from those rules alone, so one
driver serves well-formedness checking, concrete evaluation, abstract
checking, and constraint generation.

Nondeterminism is represented by finite result sets: each rule maps one
input to the set of its possible successors, and the driver takes unions.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from typing import Iterable

from .errors import DriverBudgetExceeded
from .skeletons import Branches, Filter, Hook, SkeletonBody

DEFAULT_COMBINATION_CAP = 10**6


class BranchOutcomes:
    """Partial map from branch index (1-based) to that branch's outcome.

    Branches whose interpretation produced no outcome are absent from the
    domain; `n` is the total number of branches in the bone.
    """

    __slots__ = ("n", "_m")

    def __init__(self, n: int, mapping: dict):
        self.n = n
        self._m = dict(mapping)

    def domain(self) -> tuple[int, ...]:
        return tuple(sorted(self._m))

    def is_total(self) -> bool:
        return len(self._m) == self.n

    def __getitem__(self, i: int):
        return self._m[i]

    def items(self):
        return sorted(self._m.items())

    def __repr__(self):
        return f"BranchOutcomes(n={self.n}, {self._m!r})"


class Interpretation(ABC):
    """The four rule functions an interpretation provides.

    All rules must be pure (equal inputs give equal output sets) and
    return finite iterables.
    """

    @abstractmethod
    def nil(self, state) -> Iterable:
        """Results of the empty skeleton body."""

    @abstractmethod
    def hook(self, state, in_var, term, out_var) -> Iterable:
        """Successor states of a hook bone."""

    @abstractmethod
    def filter(self, state, name, in_vars, out_vars) -> Iterable:
        """Successor states of a filter bone."""

    @abstractmethod
    def merge(self, shared, outcomes: BranchOutcomes, state) -> Iterable:
        """Successor states after merging branch outcomes."""


# The spec-facing alias: an interpretation object is the contract.
InterpretationContract = Interpretation


def interpret_body(contract: Interpretation, state, body: SkeletonBody, *,
                   max_outcome_tuples: int = DEFAULT_COMBINATION_CAP) -> frozenset:
    """All results of interpreting `body` from `state` under `contract`.

    Branch bones enumerate one outcome per branch with a non-empty result
    set; the enumeration is capped at `max_outcome_tuples` combinations
    per bone.
    """
    results = set()
    bones = body.bones

    def go(st, i):
        if i == len(bones):
            results.update(contract.nil(st))
            return
        bone = bones[i]
        if isinstance(bone, Hook):
            for st2 in contract.hook(st, bone.in_var, bone.term, bone.out_var):
                go(st2, i + 1)
        elif isinstance(bone, Filter):
            for st2 in contract.filter(st, bone.name, bone.in_vars, bone.out_vars):
                go(st2, i + 1)
        elif isinstance(bone, Branches):
            per_branch = []
            for idx, sub in enumerate(bone.branches, start=1):
                outs = interpret_body(contract, st, sub, max_outcome_tuples=max_outcome_tuples)
                if outs:
                    per_branch.append((idx, sorted(outs, key=repr)))
            count = 1
            for _, outs in per_branch:
                count *= len(outs)
                if count > max_outcome_tuples:
                    raise DriverBudgetExceeded(
                        f"branch outcome enumeration exceeds {max_outcome_tuples} tuples")
            for combo in itertools.product(*(outs for _, outs in per_branch)):
                outcomes = BranchOutcomes(
                    len(bone.branches),
                    {idx: res for (idx, _), res in zip(per_branch, combo)},
                )
                for st2 in contract.merge(bone.shared, outcomes, st):
                    go(st2, i + 1)
        else:  # pragma: no cover - bone variants are closed
            raise TypeError(f"unknown bone {bone!r}")

    go(state, 0)
    return frozenset(results)

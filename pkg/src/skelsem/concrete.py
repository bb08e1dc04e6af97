"""Concrete interpretation: big-step evaluation as triple-set membership.

The hook rule resolves sub-judgements either against a fixed hypothesis
set of triples (the one-step consequence operator) or by bounded
recursive evaluation (the practical evaluator).  Fuel counts hook
nesting depth, so results with fuel n are exactly the judgements
derivable by derivations of depth at most n.
"""

from __future__ import annotations

import sys
import threading
from dataclasses import dataclass
from typing import Iterable

from .driver import BranchOutcomes, Interpretation, interpret_body
from .errors import FuelExhausted, IllSortedEnv, IllSortedQuery, IllSortedTriple, UnknownFilter
from .fmap import FrozenMap
from .language import LanguageDefinition, lookup_skeleton
from .skeletons import X_IN, X_OUT
from .terms import Ctor, SortKind, Term, TermVar, sort_of, substitute, term_vars

ConcreteTriple = tuple  # (state value, closed term, result value)


class HookOracle:
    """Strategy for answering hook judgements."""

    def resolve(self, lang: LanguageDefinition, sigma, term: Term) -> Iterable:
        raise NotImplementedError


class TripleOracle(HookOracle):
    """Literal rule: a hook succeeds only through a known judgement."""

    def __init__(self, triples: Iterable[ConcreteTriple]):
        self._index: dict = {}
        for (s, t, v) in triples:
            self._index.setdefault((s, t), []).append(v)

    def resolve(self, lang, sigma, term):
        return tuple(self._index.get((sigma, term), ()))


class FuelOracle(HookOracle):
    """Recursive evaluation with a depth budget."""

    def __init__(self, fuel: int):
        if fuel < 0:
            raise ValueError("fuel must be non-negative")
        self.fuel = fuel

    def resolve(self, lang, sigma, term):
        if self.fuel == 0:
            raise FuelExhausted("hook recursion budget exhausted")
        return eval_term(lang, sigma, term, self.fuel - 1)


class ConcreteRules(Interpretation):
    def __init__(self, lang: LanguageDefinition, oracle: HookOracle):
        self.lang = lang
        self.oracle = oracle

    def nil(self, env):
        return (env,)

    def hook(self, env, in_var, term, out_var):
        try:
            sigma = env[in_var]
        except KeyError:
            raise IllSortedEnv(f"hook input {in_var.name} unbound") from None
        closed = _close(env, term)
        return tuple(env.set(out_var, v) for v in self.oracle.resolve(self.lang, sigma, closed))

    def filter(self, env, name, in_vars, out_vars):
        fn = self.lang.concrete_filters.get(name)
        if fn is None:
            raise UnknownFilter(f"no concrete filter {name!r}")
        try:
            args = tuple(env[v] for v in in_vars)
        except KeyError as e:
            raise IllSortedEnv(f"filter {name!r} input unbound: {e}") from None
        return tuple(env.update(zip(out_vars, outs)) for outs in fn(args))

    def merge(self, shared, outcomes: BranchOutcomes, env):
        succ = []
        for _, branch_env in outcomes.items():
            if all(v in branch_env for v in shared):
                succ.append(env.update((v, branch_env[v]) for v in shared))
        return succ


def concrete_rules(lang: LanguageDefinition, oracle: HookOracle) -> ConcreteRules:
    return ConcreteRules(lang, oracle)


def _close(env: FrozenMap, term: Term) -> Term:
    names = term_vars(term)
    if not names:
        return term
    try:
        image = {n: env[TermVar(n)] for n in names}
    except KeyError as e:
        raise IllSortedEnv(f"hook term variable unbound: {e}") from None
    return substitute(image, term)


def initial_env(sigma, term: Ctor, params) -> FrozenMap:
    env = {X_IN: sigma}
    for p, arg in zip(params, term.args):
        env[TermVar(p)] = arg
    return FrozenMap(env)


def _run_skeleton(lang, sigma, term: Ctor, oracle: HookOracle) -> frozenset:
    skel = lookup_skeleton(lang, term.name)
    env0 = initial_env(sigma, term, skel.params)
    finals = interpret_body(ConcreteRules(lang, oracle), env0, skel.body)
    return frozenset(env[X_OUT] for env in finals if X_OUT in env)


def eval_term(lang, sigma, term, fuel: int) -> frozenset:
    return _run_skeleton(lang, sigma, term, FuelOracle(fuel))


def check_query(lang: LanguageDefinition, sigma, term: Term) -> str:
    """Program sort of a well-sorted query pair, or raise IllSortedQuery."""
    if not isinstance(term, Ctor):
        raise IllSortedQuery(f"query term must be constructor-headed: {term!r}")
    try:
        s = sort_of(lang, {}, term)
    except Exception as e:
        raise IllSortedQuery(str(e)) from None
    if s.kind is not SortKind.PROGRAM:
        raise IllSortedQuery(f"term has non-program sort {s.name}")
    in_sort = lang.flow_in[s.name]
    pred = lang.value_sorts.get(in_sort)
    if pred is not None and not pred(sigma):
        raise IllSortedQuery(f"state is not a value of sort {in_sort}")
    return s.name


_WORKER_STACK = 512 * 1024 * 1024  # deep hook recursion needs real stack


def _run_deep(fn, limit: int):
    """Run `fn` on a thread with a large stack and a recursion limit to
    match; hook depth costs a couple dozen interpreter frames per level."""
    box = []

    def work():
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(limit)
        try:
            box.append(("ok", fn()))
        except BaseException as e:  # noqa: BLE001 - replayed below
            box.append(("err", e))
        finally:
            sys.setrecursionlimit(old)

    previous = threading.stack_size(_WORKER_STACK)
    try:
        worker = threading.Thread(target=work)
        worker.start()
        worker.join()
    finally:
        threading.stack_size(previous)
    tag, payload = box[0]
    if tag == "err":
        if isinstance(payload, RecursionError):
            raise FuelExhausted("interpreter stack exhausted before the fuel budget")
        raise payload
    return payload


def eval(lang: LanguageDefinition, sigma, term: Term, fuel) -> frozenset:
    """All results derivable from (sigma, term) within the fuel budget.

    An empty set means every pathway died on a filter (the program is
    stuck); FuelExhausted escapes when the budget was hit first, so
    "no result yet" is never confused with "provably stuck".
    """
    if isinstance(fuel, Fuel):
        fuel = fuel.amount
    check_query(lang, sigma, term)
    limit = min(1_000_000, 5_000 + 60 * fuel)
    if limit <= sys.getrecursionlimit():
        return eval_term(lang, sigma, term, fuel)
    return _run_deep(lambda: eval_term(lang, sigma, term, fuel), limit)


def validate_triple(lang: LanguageDefinition, triple: ConcreteTriple):
    sigma, term, value = triple
    sort_name = check_query(lang, sigma, term)
    out_sort = lang.flow_out[sort_name]
    pred = lang.value_sorts.get(out_sort)
    if pred is not None and not pred(value):
        raise IllSortedTriple(f"result is not a value of sort {out_sort}")


def immediate_consequence_on(lang: LanguageDefinition, queries, triples) -> frozenset:
    """One derivation step from the hypothesis set, restricted to `queries`.

    For each query pair the constructor's skeleton is interpreted with
    hooks resolved only through `triples`; the result is the set of
    derived judgements at those pairs.
    """
    for t in triples:
        validate_triple(lang, t)
    oracle = TripleOracle(triples)
    out = set()
    for sigma, term in queries:
        check_query(lang, sigma, term)
        for value in _run_skeleton(lang, sigma, term, oracle):
            out.add((sigma, term, value))
    return frozenset(out)


def check_triple(lang: LanguageDefinition, triple: ConcreteTriple, fuel: int) -> bool:
    """Membership of the judgement at finite depth; FuelExhausted escapes
    as indeterminate rather than mapping to False."""
    sigma, term, value = triple
    return value in eval(lang, sigma, term, fuel)


@dataclass(frozen=True)
class Fuel:
    """Named recursion budget, for callers that want the intent spelled out."""

    amount: int

    def __post_init__(self):
        if self.amount < 0:
            raise ValueError("fuel must be non-negative")

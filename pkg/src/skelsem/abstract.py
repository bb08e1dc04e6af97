"""Abstract interpretation: flagged runs over abstract domains.

A run carries a flag: ⊤ while the skeleton may still apply, ⊥ once some
filter or hypothesis ruled it out; ⊥ runs keep going, binding every
definition to the appropriate bottom, so branch merging always has one
outcome per branch to look at.

Hooks are answered from a finite hypothesis set of abstract judgements,
with optional state splitting: a hook may also use any judgement whose
state covers the queried one ("the queried γ is inside the union of the
candidate γs"), implemented for single-candidate inclusion and for
states differing in one variable.

Two search modes:
  minimal  - hooks bind the hypothesis value, filters bind the filter
             image, merges join the surviving branches pointwise.
  search   - additionally enumerates bounded upward weakenings (values
             drawn from the hypotheses, their pairwise joins, and the
             claimed target), and merges require surviving branches to
             agree exactly on the shared variables.
Minimal mode computes the precise one-step consequences; search mode is
what the invariant checker uses to witness a claimed judgement exactly.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from enum import Enum
from .domains import Bool4Domain, BotValue, FiniteSetDomain, IntervalDomain
from .driver import BranchOutcomes, Interpretation, interpret_body
from .errors import CoverCheckUnsupported, IllSortedTriple, JoinUndefined, UnknownFilter
from .fmap import FrozenMap
from .language import LanguageDefinition, lookup_skeleton
from .skeletons import X_IN, X_OUT
from .terms import BaseTerm, Ctor, Sort, SortKind, Term, TermVar, sort_of
from .wf import collect_var_sorts

MENU_CAP = 64

AbstractTriple = tuple  # (abstract state, closed term, abstract value)


class Flag(Enum):
    BOT = "bot"
    TOP = "top"

    def __repr__(self):
        return f"flag:{self.value}"


BOT, TOP = Flag.BOT, Flag.TOP


def term_sort(lang: LanguageDefinition, term: Term) -> Sort:
    return sort_of(lang, {}, term)


def close_abstract(lang, env: FrozenMap, term: Term, param_sorts: dict) -> tuple:
    """Instantiate a hook term over the abstract environment.

    Returns (abstract term, sort).  Any ⊥ component collapses the whole
    term to the ⊥ of its sort, since the term order is flat.
    """
    sort = sort_of(lang, param_sorts, term)

    def build(t: Term):
        if isinstance(t, BaseTerm):
            return t
        if isinstance(t, TermVar):
            return env[t]
        parts = []
        for a in t.args:
            p = build(a)
            if isinstance(p, BotValue):
                return lang.domains[sort_of(lang, param_sorts, t).name].bot
            parts.append(p)
        return Ctor(t.name, tuple(parts))

    return build(term), sort


def validate_abstract_triple(lang: LanguageDefinition, triple: AbstractTriple):
    sigma, term, value = triple
    if not isinstance(term, Ctor):
        raise IllSortedTriple(f"triple term must be constructor-headed: {term!r}")
    s = term_sort(lang, term)
    if s.kind is not SortKind.PROGRAM:
        raise IllSortedTriple(f"triple term has non-program sort {s.name}")
    in_dom = lang.domains[lang.flow_in[s.name]]
    out_dom = lang.domains[lang.flow_out[s.name]]
    if not in_dom.validate(sigma):
        raise IllSortedTriple(f"state is not an abstract {lang.flow_in[s.name]} value")
    if not out_dom.validate(value):
        raise IllSortedTriple(f"result is not an abstract {lang.flow_out[s.name]} value")


# ---------------------------------------------------------------------------
# State splitting
# ---------------------------------------------------------------------------


def _interval_union_covers(dom: IntervalDomain, query, parts) -> bool:
    if dom.is_bot(query):
        return True
    spans = [p for p in parts if not dom.is_bot(p)]
    covered = query.lo
    while True:
        ext = None
        for p in spans:
            if p.lo <= covered <= p.hi:
                ext = p.hi if ext is None else max(ext, p.hi)
        if ext is None:
            return False
        if ext >= query.hi:
            return True
        covered = ext + 1


def _union_covers(dom, query, parts) -> bool:
    """γ(query) ⊆ ∪ γ(part), decided per one-dimensional component."""
    if isinstance(dom, IntervalDomain):
        return _interval_union_covers(dom, query, parts)
    if isinstance(dom, (Bool4Domain, FiniteSetDomain)):
        big = dom.bot
        for p in parts:
            big = dom.join(big, p)
        return dom.leq(query, big)
    if hasattr(dom, "_components"):  # union-valued: cover componentwise
        return all(
            _union_covers(d, q, [p[i] for p in parts])
            for i, ((_, d, _), q) in enumerate(zip(dom._components, query)))
    return any(dom.leq(query, p) for p in parts)


def _diff_coords(value_dom, query: FrozenMap, cand: FrozenMap):
    coords = []
    for k in set(query) | set(cand):
        if not value_dom.leq(query.get(k, value_dom.bot), cand.get(k, value_dom.bot)):
            coords.append(k)
    return coords


def split_lookup(lang: LanguageDefinition, triples, sigma, term) -> frozenset:
    """Result values usable for `(sigma, term)` by state splitting.

    A value v is included when some judgements (s_1, term, v)..(s_n,
    term, v) cover sigma.  Cover decision implemented for n = 1 with
    sigma ⊑ s_1 and for map states differing from sigma in exactly one
    variable (one-dimensional union coverage); anything else raises
    CoverCheckUnsupported when it could have mattered.
    """
    if isinstance(term, BotValue):
        return frozenset()
    s = term_sort(lang, term)
    in_dom = lang.domains[lang.flow_in[s.name]]
    groups: dict = {}
    for (st, t, v) in triples:
        if t == term:
            groups.setdefault(v, []).append(st)

    found = set()
    unsupported = []
    for value, states in groups.items():
        if any(in_dom.leq(sigma, st) for st in states):
            found.add(value)
            continue
        if not (isinstance(sigma, FrozenMap) and all(isinstance(st, FrozenMap) for st in states)):
            if len(states) >= 2:
                unsupported.append(value)
            continue
        vd = in_dom.value_domain
        diffs = {id(st): _diff_coords(vd, sigma, st) for st in states}
        pivots = sorted({cs[0] for cs in diffs.values() if len(cs) == 1})
        covered = False
        for x in pivots:
            parts = [st.get(x, vd.bot) for st in states if len(diffs[id(st)]) <= 1
                     and (not diffs[id(st)] or diffs[id(st)][0] == x)]
            if parts and _union_covers(vd, sigma.get(x, vd.bot), parts):
                covered = True
                break
        if covered:
            found.add(value)
        elif any(len(cs) >= 2 for cs in diffs.values()):
            unsupported.append(value)
    if not found and unsupported:
        raise CoverCheckUnsupported(
            f"cover candidates for {term!r} differ from the query in more than one variable")
    return frozenset(found)


# ---------------------------------------------------------------------------
# The rules
# ---------------------------------------------------------------------------


class AbstractRules(Interpretation):
    """Abstract interpretation rules for one skeleton, against a fixed
    hypothesis set.  States and results are (flag, environment) pairs."""

    def __init__(self, lang: LanguageDefinition, hypotheses, *, mode: str = "minimal",
                 use_splitting: bool = False, param_sorts: dict | None = None,
                 var_sorts: dict | None = None, claim=None):
        assert mode in ("minimal", "search")
        self.lang = lang
        self.hypotheses = tuple(hypotheses)
        self.mode = mode
        self.use_splitting = use_splitting
        self.param_sorts = param_sorts or {}
        self.var_sorts = var_sorts or {}
        self.claim = claim
        self._by_term: dict = {}
        for (st, t, v) in self.hypotheses:
            self._by_term.setdefault(t, []).append((st, v))
        self._menus: dict = {}
        if mode == "search":
            self._menus = self._build_menus(claim)

    def _build_menus(self, claim):
        buckets: dict[str, list] = {}

        def put(sort_name, value):
            vals = buckets.setdefault(sort_name, [])
            if value not in vals:
                vals.append(value)

        for (st, t, v) in self.hypotheses:
            s = term_sort(self.lang, t)
            put(self.lang.flow_in[s.name], st)
            put(self.lang.flow_out[s.name], v)
        if claim is not None:
            sort_name, value = claim
            put(sort_name, value)
        menus = {}
        for sort_name, vals in buckets.items():
            dom = self.lang.domains[sort_name]
            menu = list(vals)
            for i in range(len(vals)):
                for j in range(i + 1, len(vals)):
                    try:
                        joined = dom.join(vals[i], vals[j])
                    except JoinUndefined:
                        continue
                    if joined not in menu:
                        menu.append(joined)
            menus[sort_name] = sorted(menu, key=repr)[:MENU_CAP]
        return menus

    def _weakenings(self, sort_name, value):
        dom = self.lang.domains[sort_name]
        out = list(dom.weaken_menu(value))
        for m in self._menus.get(sort_name, ()):
            if dom.leq(value, m) and m not in out:
                out.append(m)
        return out

    # -- rules ------------------------------------------------------------

    def nil(self, state):
        return (state,)

    def hook(self, state, in_var, term, out_var):
        flag, env = state
        t_abs, t_sort = close_abstract(self.lang, env, term, self.param_sorts)
        out_sort = self.lang.flow_out[t_sort.name]
        dom = self.lang.domains[out_sort]
        if flag is BOT:
            return ((BOT, env.set(out_var, dom.bot)),)
        sigma = env[in_var]
        in_dom = self.lang.domains[self.lang.flow_in[t_sort.name]]
        candidates = []
        if isinstance(t_abs, BotValue):
            for (st, t, v) in self.hypotheses:
                if term_sort(self.lang, t) == t_sort and in_dom.leq(sigma, st):
                    candidates.append(v)
        else:
            for (st, v) in self._by_term.get(t_abs, ()):
                if in_dom.leq(sigma, st):
                    candidates.append(v)
            if self.use_splitting:
                candidates.extend(split_lookup(self.lang, self.hypotheses, sigma, t_abs))
        succ = set()
        for v in candidates:
            if dom.is_bot(v):
                succ.add((BOT, env.set(out_var, dom.bot)))
            if self.mode == "search":
                for w in self._weakenings(out_sort, v):
                    succ.add((TOP, env.set(out_var, w)))
            else:
                succ.add((TOP, env.set(out_var, v)))
        return succ

    def filter(self, state, name, in_vars, out_vars):
        flag, env = state
        sig = self.lang.filters.get(name)
        if sig is None:
            raise UnknownFilter(f"no signature for filter {name!r}")
        out_doms = [self.lang.domains[s.name] for s in sig.out_sorts]
        bots = tuple(d.bot for d in out_doms)
        if flag is BOT:
            return ((BOT, env.update(zip(out_vars, bots))),)
        fn = self.lang.abstract_filters.get(name)
        if fn is None:
            raise UnknownFilter(f"no abstract filter {name!r}")
        args = tuple(env[v] for v in in_vars)
        result = fn(args)
        if result is None or (len(result) > 0 and all(
                d.is_bot(r) for d, r in zip(out_doms, result))):
            return ((BOT, env.update(zip(out_vars, bots))),)
        result = tuple(d.canon(r) for d, r in zip(out_doms, result))
        if self.mode != "search":
            return ((TOP, env.update(zip(out_vars, result))),)
        succ = set()
        options = [self._weakenings(s.name, r) for s, r in zip(sig.out_sorts, result)]
        for combo in itertools.product(*options):
            succ.add((TOP, env.update(zip(out_vars, combo))))
        return succ

    def merge(self, shared, outcomes: BranchOutcomes, state):
        flag, env = state
        if not outcomes.is_total():
            return ()
        results = [outcomes[i] for i in range(1, outcomes.n + 1)]
        shared_order = sorted(shared, key=lambda v: v.name)
        if all(f is BOT for f, _ in results):
            restrs = []
            for _, e in results:
                if not all(v in e for v in shared_order):
                    return ()
                restrs.append(tuple(e[v] for v in shared_order))
            if any(r != restrs[0] for r in restrs):
                return ()
            return ((BOT, env.update(zip(shared_order, restrs[0]))),)
        if flag is not TOP:
            return ()
        tops = [e for f, e in results if f is TOP]
        if not tops or not all(all(v in e for v in shared_order) for e in tops):
            return ()
        if self.mode == "search":
            restrs = [tuple(e[v] for v in shared_order) for e in tops]
            if any(r != restrs[0] for r in restrs):
                return ()
            return ((TOP, env.update(zip(shared_order, restrs[0]))),)
        joined = []
        for v in shared_order:
            dom = self.lang.domains[self.var_sorts[v].name]
            acc = tops[0][v]
            try:
                for e in tops[1:]:
                    acc = dom.join(acc, e[v])
            except JoinUndefined:
                return ()
            joined.append(acc)
        return ((TOP, env.update(zip(shared_order, joined))),)


def abstract_rules(lang, hypotheses, mode: str = "minimal", *, use_splitting: bool = False,
                   param_sorts=None, var_sorts=None, claim=None) -> AbstractRules:
    return AbstractRules(lang, hypotheses, mode=mode, use_splitting=use_splitting,
                         param_sorts=param_sorts, var_sorts=var_sorts, claim=claim)


def run_abstract(lang: LanguageDefinition, hypotheses, sigma, term: Ctor, *,
                 mode: str = "minimal", use_splitting: bool = False, claim=None) -> frozenset:
    """All (final flag, result value) pairs for one constructor application."""
    skel = lookup_skeleton(lang, term.name)
    sig = lang.constructors[term.name]
    param_sorts = {p: s for p, s in zip(skel.params, sig.arg_sorts)}
    var_sorts = collect_var_sorts(lang, skel)
    env0 = {X_IN: sigma}
    for p, arg in zip(skel.params, term.args):
        env0[TermVar(p)] = arg
    rules = AbstractRules(lang, hypotheses, mode=mode, use_splitting=use_splitting,
                          param_sorts=param_sorts, var_sorts=var_sorts, claim=claim)
    finals = interpret_body(rules, (TOP, FrozenMap(env0)), skel.body)
    return frozenset((f, env[X_OUT]) for f, env in finals if X_OUT in env)


def abstract_immediate_consequence_on(lang: LanguageDefinition, queries, triples, *,
                                      mode: str = "minimal", use_splitting: bool = False,
                                      include_bot_runs: bool = True) -> frozenset:
    """One abstract derivation step from `triples`, restricted to `queries`.

    With splitting enabled this is the split-extended operator: hooks may
    use covered judgements, and covered judgements at the queried pairs
    are included in the output.
    """
    for t in triples:
        validate_abstract_triple(lang, t)
    out = set()
    for sigma, term in queries:
        s = term_sort(lang, term)
        in_dom = lang.domains[lang.flow_in[s.name]]
        if not in_dom.validate(sigma):
            raise IllSortedTriple(f"query state is not an abstract {lang.flow_in[s.name]} value")
        for flag, value in run_abstract(lang, triples, sigma, term,
                                        mode=mode, use_splitting=use_splitting):
            if flag is TOP or include_bot_runs:
                out.add((sigma, term, value))
        if use_splitting:
            for value in split_lookup(lang, triples, sigma, term):
                out.add((sigma, term, value))
    return frozenset(out)


@dataclass
class CheckReport:
    total: int
    failures: list = field(default_factory=list)  # (triple, reason)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        passed = self.total - len(self.failures)
        return f"{'PASS' if self.ok else 'FAIL'} {passed}/{self.total}"


def check_invariant(lang: LanguageDefinition, triples, use_splitting: bool = False) -> CheckReport:
    """Certify a candidate judgement set: every member must be derivable
    in one step from the set itself (its states split-extended when
    requested).  A passing report certifies the set correct with respect
    to concrete evaluation.

    Two phases per judgement: the minimal derivation with a final ⊑ test
    against the claim (claims sit above a surviving run's value; sound
    because every filter is monotone and bindings carry upward slack),
    then, only if that misses, an exact-witness search with bounded
    weakenings over the literal rules.
    """
    triples = frozenset(triples)
    for t in triples:
        validate_abstract_triple(lang, t)
    report = CheckReport(total=len(triples))
    for triple in sorted(triples, key=repr):
        sigma, term, value = triple
        s = term_sort(lang, term)
        out_dom = lang.domains[lang.flow_out[s.name]]
        claim = (lang.flow_out[s.name], value)
        try:
            derived = run_abstract(lang, triples, sigma, term, mode="minimal",
                                   use_splitting=use_splitting)
            ok = any(v == value or (f is TOP and out_dom.leq(v, value))
                     for f, v in derived)
            if not ok:
                exact = run_abstract(lang, triples, sigma, term, mode="search",
                                     use_splitting=use_splitting, claim=claim)
                ok = any(v == value for _, v in exact)
        except CoverCheckUnsupported as e:
            report.failures.append((triple, f"cover check unsupported: {e}"))
            continue
        if not ok:
            report.failures.append((triple, "not derivable from the candidate set"))
    return report


# ---------------------------------------------------------------------------
# Filter consistency sampling
# ---------------------------------------------------------------------------


@dataclass
class FilterCounterexample:
    filter: str
    kind: str  # "consistency" or "monotonicity"
    detail: str


@dataclass
class ConsistencyReport:
    trials: dict = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def _sample_args(lang, sig, rng):
    """Paired (concrete, abstract) argument tuples with membership."""
    concrete, abstract = [], []
    for s in sig.in_sorts:
        dom = lang.domains[s.name]
        for _ in range(6):
            a = dom.sample(rng)
            v = dom.sample_gamma(rng, a)
            if v is not None:
                break
        else:
            return None
        concrete.append(v)
        abstract.append(a)
    return tuple(concrete), tuple(abstract)


def check_filter_consistency(lang: LanguageDefinition, *, trials: int = 1000,
                             seed: int = 0, filters=None,
                             max_counterexamples: int = 5) -> ConsistencyReport:
    """Sample the two filter tables against each other.

    Whenever the concrete filter relates sampled members of the abstract
    arguments to outputs, the abstract filter must apply (not ⊥) and its
    outputs must contain the concrete ones.  Monotonicity of the
    abstract filter is sampled alongside.
    """
    rng = random.Random(seed)
    report = ConsistencyReport()
    names = sorted(filters if filters is not None else lang.filters)
    for name in names:
        sig = lang.filters[name]
        cfn = lang.concrete_filters[name]
        afn = lang.abstract_filters[name]
        out_doms = [lang.domains[s.name] for s in sig.out_sorts]
        done = 0
        attempts = 0
        while done < trials and attempts < 20 * trials:
            attempts += 1
            sampled = _sample_args(lang, sig, rng)
            if sampled is None:
                continue
            concrete, abstract = sampled
            done += 1
            result = afn(abstract)
            for outs in cfn(concrete):
                if result is None:
                    report.counterexamples.append(FilterCounterexample(
                        name, "consistency",
                        f"concrete {concrete!r} -> {outs!r} but abstract {abstract!r} -> ⊥"))
                    break
                bad = [i for i, (w, r, d) in enumerate(zip(outs, result, out_doms))
                       if not d.member(w, r)]
                if bad:
                    report.counterexamples.append(FilterCounterexample(
                        name, "consistency",
                        f"output {bad[0]} of {outs!r} not in {result!r} for args {abstract!r}"))
                    break
            # monotonicity probe: weaken the arguments and compare images
            try:
                bigger = tuple(lang.domains[s.name].join(a, lang.domains[s.name].sample(rng))
                               for s, a in zip(sig.in_sorts, abstract))
            except JoinUndefined:
                continue
            r_small, r_big = afn(abstract), afn(bigger)
            small = r_small if r_small is not None else tuple(d.bot for d in out_doms)
            big = r_big if r_big is not None else tuple(d.bot for d in out_doms)
            if len(small) == len(big) and not all(
                    d.leq(a, b) for d, a, b in zip(out_doms, small, big)):
                report.counterexamples.append(FilterCounterexample(
                    name, "monotonicity",
                    f"{abstract!r} ⊑ {bigger!r} but {small!r} ⋢ {big!r}"))
            if len(report.counterexamples) >= max_counterexamples:
                break
        report.trials[name] = done
    return report


def member(lang: LanguageDefinition, sort_name: str, value, abstract_value) -> bool:
    """Concretization membership for a named sort."""
    return lang.domains[sort_name].member(value, abstract_value)

"""Abstract domains: ordered carriers with ⊥, join, and membership.

Each domain packages a partial order `leq` with a least element, a join
(least upper bound where it exists), a widening for the solver, and a
computable concretization membership test standing in for γ.  Membership
respects the order: member(v, a) and a ⊑ a' imply member(v, a').

Bottom elements always have empty concretization here; domains whose
natural least element would still concretize to something (total maps,
streams, heaps) are lifted with a fresh bottom.
"""

from __future__ import annotations

import itertools
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable

from .errors import JoinUndefined
from .fmap import FrozenMap
from .terms import BaseTerm, Ctor, Term

NEG_INF = float("-inf")
POS_INF = float("inf")


@dataclass(frozen=True)
class BotValue:
    """Adjoined least element, tagged by the domain it belongs to."""

    tag: str

    def __repr__(self):
        return f"⊥{self.tag}"


class AbstractDomain(ABC):
    """Ordered abstract carrier for one sort."""

    name: str

    @property
    @abstractmethod
    def bot(self):
        ...

    @abstractmethod
    def leq(self, a, b) -> bool:
        ...

    @abstractmethod
    def join(self, a, b):
        ...

    @abstractmethod
    def member(self, value, a) -> bool:
        """Computable concretization test: value ∈ γ(a)."""

    @abstractmethod
    def validate(self, a) -> bool:
        """Structural check that `a` is an element of this carrier."""

    def widen(self, old, new):
        """Termination-forcing join replacement; default join suffices
        for finite-height carriers."""
        return self.join(old, new)

    def is_bot(self, a) -> bool:
        return a == self.bot

    def canon(self, a):
        return a

    def weaken_menu(self, a) -> list:
        """A few canonical values above `a`, used by the derivation
        search to exercise the upward slack the rules allow when
        binding hook and filter outputs."""
        return [a]

    # -- sampling hooks for the consistency and law test harnesses -----

    def samples(self) -> list:
        return [self.bot]

    def sample(self, rng: random.Random):
        return rng.choice(self.samples())

    def sample_gamma(self, rng: random.Random, a):
        """Some concrete member of γ(a), or None when γ(a) is empty."""
        raise NotImplementedError

    # -- canonical JSON form -------------------------------------------

    @abstractmethod
    def to_json(self, a):
        ...

    @abstractmethod
    def from_json(self, obj):
        ...


# ---------------------------------------------------------------------------
# Intervals over ℤ with infinite bounds
# ---------------------------------------------------------------------------

INT_BOT = BotValue("Int")


@dataclass(frozen=True)
class Interval:
    lo: Any  # int or -inf
    hi: Any  # int or +inf

    def __repr__(self):
        lo = "-inf" if self.lo == NEG_INF else self.lo
        hi = "+inf" if self.hi == POS_INF else self.hi
        return f"[{lo},{hi}]"


def interval(lo, hi):
    """Canonical interval; empty normalizes to the bottom element."""
    if lo > hi:
        return INT_BOT
    return Interval(lo, hi)


def interval_meet(a, b):
    if a == INT_BOT or b == INT_BOT:
        return INT_BOT
    return interval(max(a.lo, b.lo), min(a.hi, b.hi))


class IntervalDomain(AbstractDomain):
    name = "Int"

    @property
    def bot(self):
        return INT_BOT

    def leq(self, a, b):
        if a == INT_BOT:
            return True
        if b == INT_BOT:
            return False
        return b.lo <= a.lo and a.hi <= b.hi

    def join(self, a, b):
        if a == INT_BOT:
            return b
        if b == INT_BOT:
            return a
        return Interval(min(a.lo, b.lo), max(a.hi, b.hi))

    def widen(self, old, new):
        if old == INT_BOT:
            return new
        if new == INT_BOT:
            return old
        lo = old.lo if new.lo >= old.lo else NEG_INF
        hi = old.hi if new.hi <= old.hi else POS_INF
        return Interval(lo, hi)

    def member(self, value, a):
        if a == INT_BOT or type(value) is not int:
            return False
        return a.lo <= value <= a.hi

    def weaken_menu(self, a):
        if a == INT_BOT:
            return [a, Interval(NEG_INF, POS_INF)]
        return [a, Interval(a.lo, POS_INF), Interval(NEG_INF, a.hi),
                Interval(NEG_INF, POS_INF)]

    def validate(self, a):
        if a == INT_BOT:
            return True
        if not isinstance(a, Interval):
            return False
        lo_ok = a.lo == NEG_INF or type(a.lo) is int
        hi_ok = a.hi == POS_INF or type(a.hi) is int
        return lo_ok and hi_ok and a.lo <= a.hi

    def samples(self):
        return [INT_BOT, Interval(0, 0), Interval(1, 1), Interval(-1, -1),
                Interval(0, 5), Interval(1, POS_INF), Interval(0, POS_INF),
                Interval(NEG_INF, 0), Interval(NEG_INF, POS_INF)]

    def sample(self, rng):
        roll = rng.random()
        if roll < 0.1:
            return INT_BOT
        lo = NEG_INF if roll < 0.25 else rng.randint(-6, 6)
        hi = POS_INF if roll > 0.85 else (rng.randint(0, 6) + (lo if lo != NEG_INF else 0))
        return interval(lo, hi)

    def sample_gamma(self, rng, a):
        if a == INT_BOT:
            return None
        lo = a.lo if a.lo != NEG_INF else (a.hi if a.hi != POS_INF else 0) - rng.randint(0, 8)
        hi = a.hi if a.hi != POS_INF else lo + rng.randint(0, 8)
        return rng.randint(int(lo), int(hi))

    def to_json(self, a):
        if a == INT_BOT:
            return {"int": None}
        lo = "-inf" if a.lo == NEG_INF else a.lo
        hi = "+inf" if a.hi == POS_INF else a.hi
        return {"int": [lo, hi]}

    def from_json(self, obj):
        payload = obj["int"]
        if payload is None:
            return INT_BOT
        lo, hi = payload
        lo = NEG_INF if lo == "-inf" else int(lo)
        hi = POS_INF if hi == "+inf" else int(hi)
        return interval(lo, hi)


# ---------------------------------------------------------------------------
# Four-point boolean lattice
# ---------------------------------------------------------------------------


class Bool4(Enum):
    BOT = "bot"
    TT = "tt"
    FF = "ff"
    TOP = "top"

    def __repr__(self):
        return f"b:{self.value}"


_BOOL_GAMMA = {
    Bool4.BOT: frozenset(),
    Bool4.TT: frozenset((True,)),
    Bool4.FF: frozenset((False,)),
    Bool4.TOP: frozenset((True, False)),
}


def bool4_of(b: bool) -> Bool4:
    return Bool4.TT if b else Bool4.FF


class Bool4Domain(AbstractDomain):
    name = "Bool"

    @property
    def bot(self):
        return Bool4.BOT

    def leq(self, a, b):
        return _BOOL_GAMMA[a] <= _BOOL_GAMMA[b]

    def join(self, a, b):
        got = _BOOL_GAMMA[a] | _BOOL_GAMMA[b]
        for cand, g in _BOOL_GAMMA.items():
            if g == got:
                return cand
        raise AssertionError

    def member(self, value, a):
        return type(value) is bool and value in _BOOL_GAMMA[a]

    def weaken_menu(self, a):
        return [a] if a is Bool4.TOP else [a, Bool4.TOP]

    def validate(self, a):
        return isinstance(a, Bool4)

    def samples(self):
        return list(Bool4)

    def sample(self, rng):
        return rng.choice(list(Bool4))

    def sample_gamma(self, rng, a):
        opts = sorted(_BOOL_GAMMA[a])
        return rng.choice(opts) if opts else None

    def to_json(self, a):
        return {"bool": a.value}

    def from_json(self, obj):
        return Bool4(obj["bool"])


# ---------------------------------------------------------------------------
# Disjoint-union values: one component per alternative, γ is the union
# ---------------------------------------------------------------------------


class UnionValueDomain(AbstractDomain):
    """Product carrier with union concretization.

    Each component over-approximates the concrete value *provided* it is
    of that component's kind, so membership checks the matching
    component only.
    """

    def __init__(self, name, components: list[tuple[str, AbstractDomain, Any]]):
        # components: (label, domain, concrete-kind predicate)
        self.name = name
        self._components = components

    @property
    def bot(self):
        return tuple(d.bot for _, d, _ in self._components)

    def leq(self, a, b):
        return all(d.leq(x, y) for (_, d, _), x, y in zip(self._components, a, b))

    def join(self, a, b):
        return tuple(d.join(x, y) for (_, d, _), x, y in zip(self._components, a, b))

    def widen(self, old, new):
        return tuple(d.widen(x, y) for (_, d, _), x, y in zip(self._components, old, new))

    def member(self, value, a):
        for (label, d, pred), x in zip(self._components, a):
            if pred(value):
                return d.member(value, x)
        return False

    def weaken_menu(self, a):
        options = [d.weaken_menu(x)[:3] for (_, d, _), x in zip(self._components, a)]
        return [tuple(combo) for combo in itertools.product(*options)][:12]

    def validate(self, a):
        return (isinstance(a, tuple) and len(a) == len(self._components)
                and all(d.validate(x) for (_, d, _), x in zip(self._components, a)))

    def samples(self):
        out = [self.bot]
        for i, (_, d, _) in enumerate(self._components):
            for s in d.samples():
                v = list(self.bot)
                v[i] = s
                out.append(tuple(v))
        return out

    def sample(self, rng):
        return tuple(d.sample(rng) for _, d, _ in self._components)

    def sample_gamma(self, rng, a):
        picks = []
        for (_, d, _), x in zip(self._components, a):
            v = d.sample_gamma(rng, x)
            if v is not None:
                picks.append(v)
        return rng.choice(picks) if picks else None

    def to_json(self, a):
        inner = {}
        for (label, d, _), x in zip(self._components, a):
            inner.update(d.to_json(x))
        return {"val": inner}

    def from_json(self, obj):
        inner = obj["val"]
        return tuple(d.from_json({label: inner[label]}) for label, d, _ in self._components)


# ---------------------------------------------------------------------------
# Total maps with default ⊥, lifted with a fresh bottom
# ---------------------------------------------------------------------------


class MapDomain(AbstractDomain):
    """Identifier-indexed total map with default ⊥, ordered pointwise.

    Members are partial concrete maps: every bound identifier must
    satisfy membership; unbound identifiers are unconstrained.
    """

    def __init__(self, name, value_domain: AbstractDomain, tag: str, json_tag: str,
                 key_to_json=str, key_from_json=str, sample_keys=("x", "y")):
        self.name = name
        self.value_domain = value_domain
        self._bot = BotValue(tag)
        self.json_tag = json_tag
        self._k2j = key_to_json
        self._kfj = key_from_json
        self._sample_keys = sample_keys

    @property
    def bot(self):
        return self._bot

    def canon(self, a):
        if isinstance(a, BotValue):
            return a
        vd = self.value_domain
        return FrozenMap({k: vd.canon(v) for k, v in a.items() if not vd.is_bot(vd.canon(v))})

    def leq(self, a, b):
        if isinstance(a, BotValue):
            return True
        if isinstance(b, BotValue):
            return False
        vd = self.value_domain
        for k in set(a) | set(b):
            if not vd.leq(a.get(k, vd.bot), b.get(k, vd.bot)):
                return False
        return True

    def join(self, a, b):
        if isinstance(a, BotValue):
            return b
        if isinstance(b, BotValue):
            return a
        vd = self.value_domain
        out = {}
        for k in set(a) | set(b):
            v = vd.join(a.get(k, vd.bot), b.get(k, vd.bot))
            if not vd.is_bot(v):
                out[k] = v
        return FrozenMap(out)

    def widen(self, old, new):
        if isinstance(old, BotValue):
            return new
        if isinstance(new, BotValue):
            return old
        vd = self.value_domain
        out = {}
        for k in set(old) | set(new):
            v = vd.widen(old.get(k, vd.bot), new.get(k, vd.bot))
            if not vd.is_bot(v):
                out[k] = v
        return FrozenMap(out)

    def member(self, value, a):
        if isinstance(a, BotValue):
            return False
        vd = self.value_domain
        return all(vd.member(v, a.get(k, vd.bot)) for k, v in value.items())

    def validate(self, a):
        if a == self._bot:
            return True
        return isinstance(a, FrozenMap) and all(self.value_domain.validate(v) for v in a.values())

    def make(self, mapping) -> FrozenMap:
        return self.canon(FrozenMap(mapping))

    def samples(self):
        vd = self.value_domain
        out = [self._bot, FrozenMap()]
        vs = vd.samples()
        k = self._sample_keys[0]
        out.extend(FrozenMap({k: v}) for v in vs[:4] if not vd.is_bot(v))
        return out

    def sample(self, rng):
        if rng.random() < 0.05:
            return self._bot
        out = {}
        for k in self._sample_keys:
            if rng.random() < 0.7:
                v = self.value_domain.sample(rng)
                if not self.value_domain.is_bot(v):
                    out[k] = v
        return FrozenMap(out)

    def sample_gamma(self, rng, a):
        if isinstance(a, BotValue):
            return None
        out = {}
        for k, v in a.items():
            if rng.random() < 0.8:
                c = self.value_domain.sample_gamma(rng, v)
                if c is not None:
                    out[k] = c
        return FrozenMap(out)

    def to_json(self, a):
        if isinstance(a, BotValue):
            return {self.json_tag: None}
        vd = self.value_domain
        return {self.json_tag: {self._k2j(k): vd.to_json(v)
                                for k, v in sorted(a.items(), key=lambda kv: self._k2j(kv[0]))}}

    def from_json(self, obj):
        payload = obj[self.json_tag]
        if payload is None:
            return self._bot
        vd = self.value_domain
        return self.canon(FrozenMap({self._kfj(k): vd.from_json(v) for k, v in payload.items()}))


# ---------------------------------------------------------------------------
# Finite sets (location abstraction)
# ---------------------------------------------------------------------------


class FiniteSetDomain(AbstractDomain):
    name = "Loc"

    def __init__(self, make_concrete=None):
        # how to build a concrete member from an address (identity by default)
        self._make = make_concrete or (lambda addr: addr)

    @property
    def bot(self):
        return frozenset()

    def leq(self, a, b):
        return a <= b

    def join(self, a, b):
        return a | b

    def member(self, value, a):
        addr = getattr(value, "addr", value)
        return addr in a

    def validate(self, a):
        return isinstance(a, frozenset) and all(type(x) is int for x in a)

    def samples(self):
        return [frozenset(), frozenset((0,)), frozenset((1,)), frozenset((0, 1))]

    def sample(self, rng):
        return frozenset(x for x in range(4) if rng.random() < 0.3)

    def sample_gamma(self, rng, a):
        return self._make(rng.choice(sorted(a))) if a else None

    def to_json(self, a):
        return {"loc": sorted(a)}

    def from_json(self, obj):
        return frozenset(int(x) for x in obj["loc"])


# ---------------------------------------------------------------------------
# Streams: ⊥ or one abstract value bounding every element
# ---------------------------------------------------------------------------


class StreamDomain(AbstractDomain):
    def __init__(self, name, value_domain: AbstractDomain, tag: str):
        self.name = name
        self.value_domain = value_domain
        self._bot = BotValue(tag)

    @property
    def bot(self):
        return self._bot

    def leq(self, a, b):
        if isinstance(a, BotValue):
            return True
        if isinstance(b, BotValue):
            return False
        return self.value_domain.leq(a, b)

    def join(self, a, b):
        if isinstance(a, BotValue):
            return b
        if isinstance(b, BotValue):
            return a
        return self.value_domain.join(a, b)

    def widen(self, old, new):
        if isinstance(old, BotValue):
            return new
        if isinstance(new, BotValue):
            return old
        return self.value_domain.widen(old, new)

    def member(self, value, a):
        if isinstance(a, BotValue):
            return False
        return all(self.value_domain.member(v, a) for v in value)

    def validate(self, a):
        return a == self._bot or self.value_domain.validate(a)

    def samples(self):
        return [self._bot, *self.value_domain.samples()]

    def sample(self, rng):
        if rng.random() < 0.15:
            return self._bot
        return self.value_domain.sample(rng)

    def sample_gamma(self, rng, a):
        if isinstance(a, BotValue):
            return None
        out = []
        for _ in range(rng.randint(0, 3)):
            v = self.value_domain.sample_gamma(rng, a)
            if v is None:
                break
            out.append(v)
        return tuple(out)

    def to_json(self, a):
        if isinstance(a, BotValue):
            return {"stream": None}
        return {"stream": self.value_domain.to_json(a)}

    def from_json(self, obj):
        payload = obj["stream"]
        if payload is None:
            return self._bot
        return self.value_domain.from_json(payload)


# ---------------------------------------------------------------------------
# Heaps: allocation counter kept exact, store abstracted pointwise
# ---------------------------------------------------------------------------


class HeapDomain(AbstractDomain):
    """⊥ or a pair (next, store).  Two heaps compare only when the
    counter and store domain agree, so join is partial: programs whose
    allocation shape diverges across branches fall outside this domain.
    """

    name = "Heap"

    def __init__(self, value_domain: AbstractDomain):
        self.value_domain = value_domain
        self._bot = BotValue("Heap")

    @property
    def bot(self):
        return self._bot

    def leq(self, a, b):
        if isinstance(a, BotValue):
            return True
        if isinstance(b, BotValue):
            return False
        an, astore = a
        bn, bstore = b
        if an != bn or set(astore) != set(bstore):
            return False
        return all(self.value_domain.leq(astore[k], bstore[k]) for k in astore)

    def join(self, a, b):
        if isinstance(a, BotValue):
            return b
        if isinstance(b, BotValue):
            return a
        an, astore = a
        bn, bstore = b
        if an != bn or set(astore) != set(bstore):
            raise JoinUndefined(f"heap shapes differ: next={an}/{bn}")
        return (an, FrozenMap({k: self.value_domain.join(astore[k], bstore[k]) for k in astore}))

    def widen(self, old, new):
        if isinstance(old, BotValue):
            return new
        if isinstance(new, BotValue):
            return old
        on, ostore = old
        nn, nstore = new
        if on != nn or set(ostore) != set(nstore):
            raise JoinUndefined(f"heap shapes differ: next={on}/{nn}")
        return (on, FrozenMap({k: self.value_domain.widen(ostore[k], nstore[k]) for k in ostore}))

    def member(self, value, a):
        if isinstance(a, BotValue):
            return False
        n, store = value
        an, astore = a
        if n != an or set(store) != set(astore):
            return False
        return all(self.value_domain.member(store[k], astore[k]) for k in store)

    def validate(self, a):
        if a == self._bot:
            return True
        if not (isinstance(a, tuple) and len(a) == 2 and type(a[0]) is int):
            return False
        return isinstance(a[1], FrozenMap) and all(self.value_domain.validate(v) for v in a[1].values())

    def samples(self):
        vs = [v for v in self.value_domain.samples() if not self.value_domain.is_bot(v)]
        out = [self._bot, (0, FrozenMap())]
        if vs:
            out.append((1, FrozenMap({0: vs[0]})))
        return out

    def sample(self, rng):
        if rng.random() < 0.1:
            return self._bot
        n = rng.randint(0, 2)
        return (n, FrozenMap({i: self.value_domain.sample(rng) for i in range(n)}))

    def sample_gamma(self, rng, a):
        if isinstance(a, BotValue):
            return None
        n, store = a
        out = {}
        for k, v in store.items():
            c = self.value_domain.sample_gamma(rng, v)
            if c is None:
                return None
            out[k] = c
        return (n, FrozenMap(out))

    def to_json(self, a):
        if isinstance(a, BotValue):
            return {"heap": None}
        n, store = a
        return {"heap": {"next": n,
                         "store": {str(k): self.value_domain.to_json(v)
                                   for k, v in sorted(store.items())}}}

    def from_json(self, obj):
        payload = obj["heap"]
        if payload is None:
            return self._bot
        store = FrozenMap({int(k): self.value_domain.from_json(v)
                           for k, v in payload["store"].items()})
        return (int(payload["next"]), store)


# ---------------------------------------------------------------------------
# Tuples with conjunctive concretization
# ---------------------------------------------------------------------------


class TupleDomain(AbstractDomain):
    def __init__(self, name, components: list[AbstractDomain], json_tag: str):
        self.name = name
        self.components = components
        self.json_tag = json_tag

    @property
    def bot(self):
        return tuple(d.bot for d in self.components)

    def leq(self, a, b):
        return all(d.leq(x, y) for d, x, y in zip(self.components, a, b))

    def join(self, a, b):
        return tuple(d.join(x, y) for d, x, y in zip(self.components, a, b))

    def widen(self, old, new):
        return tuple(d.widen(x, y) for d, x, y in zip(self.components, old, new))

    def member(self, value, a):
        return all(d.member(v, x) for d, v, x in zip(self.components, value, a))

    def validate(self, a):
        return (isinstance(a, tuple) and len(a) == len(self.components)
                and all(d.validate(x) for d, x in zip(self.components, a)))

    def samples(self):
        out = [self.bot]
        for i, d in enumerate(self.components):
            for s in d.samples()[:3]:
                v = list(self.bot)
                v[i] = s
                out.append(tuple(v))
        return out

    def sample(self, rng):
        return tuple(d.sample(rng) for d in self.components)

    def sample_gamma(self, rng, a):
        out = []
        for d, x in zip(self.components, a):
            v = d.sample_gamma(rng, x)
            if v is None:
                return None
            out.append(v)
        return tuple(out)

    def to_json(self, a):
        return {self.json_tag: [d.to_json(x) for d, x in zip(self.components, a)]}

    def from_json(self, obj):
        return tuple(d.from_json(x) for d, x in zip(self.components, obj[self.json_tag]))


# ---------------------------------------------------------------------------
# Flat term domains (one per base/program sort)
# ---------------------------------------------------------------------------


class FlatTermDomain(AbstractDomain):
    """Terms of one sort under the flat order: ⊥ below, t ⊑ t' iff t = t'."""

    def __init__(self, sort_name: str, sample_terms: Iterable[Term] = ()):
        self.name = f"term:{sort_name}"
        self.sort_name = sort_name
        self._bot = BotValue(self.name)
        self._samples = list(sample_terms)

    @property
    def bot(self):
        return self._bot

    def leq(self, a, b):
        return a == self._bot or a == b

    def join(self, a, b):
        if a == self._bot:
            return b
        if b == self._bot:
            return a
        if a == b:
            return a
        raise JoinUndefined(f"distinct terms of sort {self.sort_name} have no join")

    def member(self, value, a):
        return a != self._bot and value == a

    def validate(self, a):
        return a == self._bot or isinstance(a, (BaseTerm, Ctor))

    def samples(self):
        return [self._bot, *self._samples]

    def sample(self, rng):
        if not self._samples or rng.random() < 0.1:
            return self._bot
        return rng.choice(self._samples)

    def sample_gamma(self, rng, a):
        return None if a == self._bot else a

    def to_json(self, a):  # terms serialize through the language surface syntax
        raise NotImplementedError("term values serialize via the language printer")

    def from_json(self, obj):
        raise NotImplementedError("term values parse via the language parser")

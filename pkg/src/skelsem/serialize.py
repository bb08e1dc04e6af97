"""Canonical JSON forms for abstract values, judgement files, and
constraint sets, plus the CLI's concrete-state syntax."""

from __future__ import annotations

import json

from .constraints import ConstraintSet, Eq, EqTerm, FilterApp, Leq, SortIs
from .errors import SkelsemError
from .fmap import FrozenMap
from .language import LanguageDefinition
from .lang.surface import parse_term, print_term
from .terms import SortKind, sort_of


def value_to_json(lang: LanguageDefinition, sort_name: str, value):
    return lang.domains[sort_name].to_json(value)


def value_from_json(lang: LanguageDefinition, sort_name: str, obj):
    return lang.domains[sort_name].from_json(obj)


def _is_ext(lang: LanguageDefinition) -> bool:
    return "in" in lang.constructors


def triple_to_json(lang: LanguageDefinition, triple) -> dict:
    sigma, term, value = triple
    s = sort_of(lang, {}, term)
    return {
        "state": value_to_json(lang, lang.flow_in[s.name], sigma),
        "term": print_term(term),
        "result": value_to_json(lang, lang.flow_out[s.name], value),
    }


def triples_to_json(lang: LanguageDefinition, triples) -> list:
    rows = [triple_to_json(lang, t) for t in triples]
    return sorted(rows, key=lambda r: json.dumps(r, sort_keys=True))


def triple_from_json(lang: LanguageDefinition, obj) -> tuple:
    term = parse_term(obj["term"], ext=_is_ext(lang))
    s = sort_of(lang, {}, term)
    if s.kind is not SortKind.PROGRAM:
        raise SkelsemError(f"triple term has non-program sort {s.name}")
    try:
        sigma = value_from_json(lang, lang.flow_in[s.name], obj["state"])
        value = value_from_json(lang, lang.flow_out[s.name], obj["result"])
    except (KeyError, TypeError, ValueError) as e:
        raise SkelsemError(
            f"malformed abstract value for term {obj['term']!r}: {e!r}") from None
    return (sigma, term, value)


def triples_from_json(lang: LanguageDefinition, data) -> frozenset:
    return frozenset(triple_from_json(lang, obj) for obj in data)


def constraint_to_json(c) -> dict:
    if isinstance(c, Leq):
        return {"leq": [c.lo.text, c.hi.text]}
    if isinstance(c, Eq):
        return {"eq": [c.a.text, c.b.text]}
    if isinstance(c, EqTerm):
        return {"eqterm": [c.var.text, print_term(c.term)]}
    if isinstance(c, FilterApp):
        return {"filter": c.name, "in": [v.text for v in c.ins], "out": [v.text for v in c.outs]}
    raise TypeError(f"not a serializable constraint: {c!r}")


def constraint_set_to_json(cset: ConstraintSet) -> dict:
    rows = [constraint_to_json(c) for c in cset.constraints if not isinstance(c, SortIs)]
    rows.sort(key=lambda r: json.dumps(r, sort_keys=True))
    return {
        "vars": {cv.text: sort for cv, sort in
                 sorted(cset.var_sorts.items(), key=lambda kv: kv[0].text)},
        "constraints": rows,
    }


def parse_concrete_state(text: str) -> FrozenMap:
    """CLI state syntax: `x=5,flag=true` (empty string = empty state)."""
    out = {}
    if text.strip():
        for part in text.split(","):
            name, _, raw = part.partition("=")
            name = name.strip()
            raw = raw.strip()
            if not name or not raw:
                raise SkelsemError(f"bad state binding {part!r}")
            if raw == "true":
                out[name] = True
            elif raw == "false":
                out[name] = False
            else:
                out[name] = int(raw)
    return FrozenMap(out)


def format_concrete_state(state: FrozenMap) -> str:
    def fmt(v):
        if v is True:
            return "true"
        if v is False:
            return "false"
        return str(v)

    inner = ",".join(f"{k}={fmt(v)}" for k, v in sorted(state.items()))
    return "{%s}" % inner

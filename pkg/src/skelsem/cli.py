"""Command-line front end.

Verbs: check-wf, eval, check-triples, gen-constraints, analyze,
show-skeleton, prove-filters.  Machine artifacts are JSON; human
summaries go to stdout, diagnostics to stderr.  Exit codes: 0 success,
1 check failure, 2 usage error, 3 stuck evaluation, 4 fuel exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys

from .abstract import check_filter_consistency, check_invariant
from .concrete import eval as eval_program
from .constraints import ConstraintVar, generate, solution_to_triples, solve
from .errors import FuelExhausted, InvariantCheckFailed, SkelsemError
from .fmap import FrozenMap
from .lang import get_language
from .lang.surface import parse_program
from .serialize import (
    constraint_set_to_json,
    format_concrete_state,
    parse_concrete_state,
    triple_to_json,
    triples_from_json,
    value_from_json,
)
from .skeletons import X_IN, X_OUT, format_skeleton
from .terms import sort_of
from .wf import check_language


def _add_lang(p, json_flag=False):
    p.add_argument("--lang", choices=["while", "while-ext"], default="while")
    if json_flag:
        p.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skelsem")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("check-wf", help="well-formedness of every skeleton")
    _add_lang(p, json_flag=True)

    p = sub.add_parser("eval", help="run a program from a concrete state")
    _add_lang(p, json_flag=True)
    p.add_argument("program")
    p.add_argument("--state", default="")
    p.add_argument("--fuel", type=int, default=10000)
    p.add_argument("--input", default=None, help="comma-separated input stream (while-ext)")

    p = sub.add_parser("check-triples", help="certify a judgement file")
    _add_lang(p, json_flag=True)
    p.add_argument("file")
    p.add_argument("--split", action="store_true")

    p = sub.add_parser("gen-constraints", help="emit flow constraints as JSON")
    _add_lang(p)
    p.add_argument("program")
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("analyze", help="generate, solve, and certify")
    _add_lang(p)
    p.add_argument("program")
    p.add_argument("--state", default=None, help="abstract state JSON (or @file)")
    p.add_argument("--widen-after", type=int, default=3)

    p = sub.add_parser("show-skeleton", help="dump skeletons in bone notation")
    _add_lang(p)
    p.add_argument("ctor", nargs="?", default=None)

    p = sub.add_parser("prove-filters", help="sample filter consistency")
    _add_lang(p, json_flag=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    return parser


def _read_program(lang, path: str):
    with open(path) as fh:
        return parse_program(fh.read(), ext=(lang.name == "while-ext"))


def cmd_check_wf(args) -> int:
    lang = get_language(args.lang)
    report = check_language(lang)
    if args.json:
        rows = []
        for sk in report.per_skeleton:
            row = {"skeleton": sk.skeleton, "ok": sk.ok}
            if not sk.ok:
                row["bone"], row["reason"], _ = sk.first()
            rows.append(row)
        print(json.dumps(rows, sort_keys=True))
    else:
        for sk in report.per_skeleton:
            if sk.ok:
                print(f"OK {sk.skeleton}")
            else:
                path, reason, _ = sk.first()
                print(f"FAIL {sk.skeleton} bone={path} reason={reason}")
    return 0 if report.ok else 1


def _format_eval_result(lang, value) -> str:
    if lang.name == "while":
        return format_concrete_state(value)
    ok, (_, out, store, heap) = value
    text = f"{'OK' if ok else 'EXC'} {format_concrete_state(store)} out={list(out)}"
    n, cells = heap
    if n:
        inner = ",".join(f"{k}={v}" for k, v in sorted(cells.items()))
        text += " heap={%s}" % inner
    return text


def cmd_eval(args) -> int:
    lang = get_language(args.lang)
    term = _read_program(lang, args.program)
    store = parse_concrete_state(args.state)
    if lang.name == "while":
        sigma = store
    else:
        stream = tuple(int(x) for x in args.input.split(",")) if args.input else ()
        sigma = (stream, (), store, (0, FrozenMap()))
    try:
        results = eval_program(lang, sigma, term, args.fuel)
    except FuelExhausted:
        print(json.dumps({"status": "fuel"}) if args.json else "FUEL")
        return 4
    if not results:
        print(json.dumps({"status": "stuck"}) if args.json else "STUCK")
        return 3
    lines = [_format_eval_result(lang, v) for v in sorted(results, key=repr)]
    if args.json:
        print(json.dumps({"status": "ok", "results": lines}, sort_keys=True))
    else:
        for line in lines:
            print(line)
    return 0


def cmd_check_triples(args) -> int:
    lang = get_language(args.lang)
    with open(args.file) as fh:
        triples = triples_from_json(lang, json.load(fh))
    report = check_invariant(lang, triples, use_splitting=args.split)
    if args.json:
        failures = sorted(
            (dict(triple_to_json(lang, t), reason=r) for t, r in report.failures),
            key=lambda row: json.dumps(row, sort_keys=True))
        print(json.dumps({"total": report.total, "ok": report.ok,
                          "failures": failures}, sort_keys=True))
    else:
        print(report.summary())
        for triple, reason in report.failures:
            print(json.dumps(triple_to_json(lang, triple), sort_keys=True), file=sys.stderr)
            print(f"  reason: {reason}", file=sys.stderr)
    return 0 if report.ok else 1


def cmd_gen_constraints(args) -> int:
    lang = get_language(args.lang)
    term = _read_program(lang, args.program)
    payload = json.dumps(constraint_set_to_json(generate(lang, term)), indent=2, sort_keys=True)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    return 0


def cmd_analyze(args) -> int:
    lang = get_language(args.lang)
    term = _read_program(lang, args.program)
    cset = generate(lang, term)
    seeds = {}
    if args.state:
        raw = args.state
        if raw.startswith("@"):
            with open(raw[1:]) as fh:
                raw = fh.read()
        s = sort_of(lang, {}, term)
        seeds[ConstraintVar((), X_IN.name)] = value_from_json(
            lang, lang.flow_in[s.name], json.loads(raw))
    sol = solve(lang, cset, widen_after=args.widen_after, seeds=seeds)
    try:
        solution_to_triples(lang, sol, term)
    except InvariantCheckFailed as e:
        print(str(e), file=sys.stderr)
        return 1
    root = (sol.at((), X_IN.name), term, sol.at((), X_OUT.name))
    print(json.dumps(triple_to_json(lang, root), sort_keys=True))
    return 0


def cmd_show_skeleton(args) -> int:
    lang = get_language(args.lang)
    skeletons = lang.skeletons
    if args.ctor is not None:
        skeletons = [lang.lookup_skeleton(args.ctor)]
    for sk in skeletons:
        print(format_skeleton(sk))
    return 0


def cmd_prove_filters(args) -> int:
    lang = get_language(args.lang)
    report = check_filter_consistency(lang, trials=args.trials, seed=args.seed)
    if args.json:
        rows = {name: {"trials": report.trials[name],
                       "ok": not any(c.filter == name for c in report.counterexamples)}
                for name in report.trials}
        print(json.dumps(rows, sort_keys=True))
    else:
        for name in sorted(report.trials):
            bad = [c for c in report.counterexamples if c.filter == name]
            if bad:
                print(f"FAIL {name} trials={report.trials[name]}")
                for c in bad:
                    print(f"  {c.kind}: {c.detail}", file=sys.stderr)
            else:
                print(f"OK {name} trials={report.trials[name]}")
    return 0 if report.ok else 1


COMMANDS = {
    "check-wf": cmd_check_wf,
    "eval": cmd_eval,
    "check-triples": cmd_check_triples,
    "gen-constraints": cmd_gen_constraints,
    "analyze": cmd_analyze,
    "show-skeleton": cmd_show_skeleton,
    "prove-filters": cmd_prove_filters,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return COMMANDS[args.verb](args)
    except (SkelsemError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""skelsem: executable skeletal semantics.

A language is defined once, as one skeleton per constructor; from that
single definition the engine derives a well-formedness checker, a
concrete big-step evaluator, an abstract (interval) checker with state
splitting, and a flow-sensitive constraint generator with a widening
solver.  Bundled packs: base While and While extended with exceptions,
I/O streams, and a heap.
"""

from .abstract import (
    abstract_immediate_consequence_on,
    abstract_rules,
    check_filter_consistency,
    check_invariant,
    member,
    run_abstract,
    split_lookup,
)
from .concrete import (
    check_triple,
    concrete_rules,
    eval,
    immediate_consequence_on,
)
from .constraints import gen_points, generate, hook_point, solution_to_triples, solve
from .driver import Interpretation, InterpretationContract, interpret_body
from .fmap import FrozenMap
from .lang import get_language
from .lang.while_base import parse_while, while_language
from .lang.while_ext import ext_while_language, parse_while_ext
from .language import LanguageDefinition, lookup_skeleton, validate_language
from .terms import (
    BaseTerm,
    Ctor,
    Term,
    TermVar,
    sort_of,
    substitute,
    subterm_at,
    term_vars,
)
from .wf import check_language, check_skeleton, wf_rules

__version__ = "0.1.0"

"""Skeletons: one recipe per constructor, written as a sequence of bones.

A bone is a hook (recursive judgement on a subterm), a filter (named
test/transformation on bound values), or a branch set with the skeletal
variables all branches must share.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .terms import Term, TermVar


@dataclass(frozen=True)
class FlowVar:
    name: str

    def __repr__(self):
        return self.name


SkeletalVar = Union[TermVar, FlowVar]

# Distinguished flow variables: the incoming semantic state and the
# variable that must hold the final result of every skeleton.
X_IN = FlowVar("x_s")
X_OUT = FlowVar("x_o")


@dataclass(frozen=True)
class Hook:
    in_var: FlowVar
    term: Term
    out_var: FlowVar


@dataclass(frozen=True)
class Filter:
    name: str
    in_vars: tuple[SkeletalVar, ...]
    out_vars: tuple[SkeletalVar, ...]


@dataclass(frozen=True)
class Branches:
    shared: frozenset[SkeletalVar]
    branches: tuple["SkeletonBody", ...]


Bone = Union[Hook, Filter, Branches]


@dataclass(frozen=True)
class SkeletonBody:
    bones: tuple[Bone, ...]


@dataclass(frozen=True)
class Skeleton:
    name: str
    ctor: str
    params: tuple[str, ...]
    body: SkeletonBody


def body(*bones: Bone) -> SkeletonBody:
    return SkeletonBody(tuple(bones))


def hook(in_var: FlowVar, term: Term, out_var: FlowVar) -> Hook:
    return Hook(in_var, term, out_var)


def filt(name: str, ins, outs) -> Filter:
    return Filter(name, tuple(ins), tuple(outs))


def branches(shared, *bodies: SkeletonBody) -> Branches:
    return Branches(frozenset(shared), tuple(bodies))


def _term_text(t: Term) -> str:
    if isinstance(t, TermVar):
        return t.name
    if hasattr(t, "args"):
        if not t.args:
            return t.name
        return f"{t.name}({', '.join(_term_text(a) for a in t.args)})"
    return repr(t)


def _var_text(v: SkeletalVar) -> str:
    return v.name


def format_body(b: SkeletonBody, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    for bone in b.bones:
        if isinstance(bone, Hook):
            lines.append(f"{pad}H {bone.in_var.name} |- {_term_text(bone.term)} -| {bone.out_var.name}")
        elif isinstance(bone, Filter):
            ins = ", ".join(_var_text(v) for v in bone.in_vars)
            outs = ", ".join(_var_text(v) for v in bone.out_vars)
            lines.append(f"{pad}F {bone.name}({ins}) |> ({outs})")
        else:
            shared = ", ".join(sorted(v.name for v in bone.shared))
            lines.append(f"{pad}BRANCH {{{shared}}}:")
            for i, sub in enumerate(bone.branches, start=1):
                lines.append(f"{pad}  {i}:")
                lines.extend(format_body(sub, indent + 2))
    return lines


def format_skeleton(skel: Skeleton) -> str:
    """Readable dump of a skeleton, one bone per line, branches indented."""
    params = ", ".join(skel.params)
    head = f"{skel.name}: {skel.ctor}({params})"
    return "\n".join([head, *format_body(skel.body, indent=1)])

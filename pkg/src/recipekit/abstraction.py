"""Least-general generalization of sample expressions and function synthesis.

The generalizer copies whatever all samples agree on and turns each maximal
disagreeing subtree into a hole; holes whose per-sample subexpressions
coincide are merged, so a value reused across positions becomes a single
parameter. Applications of atomic forms (make-posn by default) are treated
as leaves: a posn is one value, not two numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .semtypes import (
    Boolean,
    ImageT,
    NonNegReal,
    PosnT,
    Real,
    SemType,
    Signature,
    StringAny,
    StringEnum,
    render_signature,
    signature_from_values,
)
from .sexpr import (
    AndE,
    App,
    CommentBlock,
    Cond,
    ConstantDef,
    Expr,
    FunctionDef,
    NO_SPAN,
    OrE,
    SourceSpan,
    TestDef,
    VarRef,
    children,
    print_definition,
    replace_children,
)
from .values import Value

DEFAULT_ATOMIC_FORMS = frozenset({"make-posn"})

Path = tuple[int, ...]


@dataclass(frozen=True)
class Hole:
    """Template position where the samples disagree."""

    hole_id: int
    span: SourceSpan = field(default=NO_SPAN, compare=False)
    node_id: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class HoleInfo:
    hole_id: int
    subexprs: tuple[Expr, ...]  # one per sample, in sample order
    positions: tuple[Path, ...]


@dataclass(frozen=True)
class Generalization:
    template: Expr  # contains Hole nodes
    holes: tuple[HoleInfo, ...]


class ShapeError(Exception):
    """Samples disagree on a special-form kind and cannot be abstracted."""

    def __init__(self, message: str, spans: tuple[SourceSpan, SourceSpan]):
        super().__init__(message)
        self.message = message
        self.spans = spans


class NoDifferenceError(Exception):
    """All samples are identical; there is nothing to parameterize."""


_SPECIAL = (Cond, AndE, OrE)


def _shape(e: Expr):
    """Recursion key: samples recurse together only when shapes agree."""
    if isinstance(e, App):
        return ("app", e.op, len(e.args))
    if isinstance(e, Cond):
        return ("cond", len(e.clauses), e.else_answer is not None)
    if isinstance(e, AndE):
        return ("and", len(e.args))
    if isinstance(e, OrE):
        return ("or", len(e.args))
    return None  # literals and names never recurse


def generalize(samples: Sequence[Expr],
               atomic_forms: frozenset[str] = DEFAULT_ATOMIC_FORMS) -> Generalization:
    """Compute the least-general generalization of two or more samples."""
    if len(samples) < 2:
        raise ValueError("generalization needs at least 2 sample expressions")
    raw: list[tuple[Path, tuple[Expr, ...]]] = []

    def hole(nodes: tuple[Expr, ...], path: Path) -> Hole:
        raw.append((path, nodes))
        return Hole(len(raw) - 1)

    def recurse(nodes: tuple[Expr, ...], path: Path) -> Expr:
        first = nodes[0]
        if all(n == first for n in nodes[1:]):
            return first
        specials = [n for n in nodes if isinstance(n, _SPECIAL)]
        if len({type(s) for s in specials}) > 1:
            a = specials[0]
            b = next(s for s in specials if type(s) is not type(a))
            kinds = {Cond: "cond", AndE: "and", OrE: "or"}
            raise ShapeError(
                f"samples mix {kinds[type(a)]} and {kinds[type(b)]} expressions",
                (a.span, b.span),
            )
        key = _shape(first)
        if key is None or any(_shape(n) != key for n in nodes[1:]):
            return hole(nodes, path)
        if isinstance(first, App) and first.op in atomic_forms:
            return hole(nodes, path)  # atomic form differs: one value, one hole
        kids = [children(n) for n in nodes]
        rebuilt = [
            recurse(tuple(k[i] for k in kids), path + (i,))
            for i in range(len(kids[0]))
        ]
        return replace_children(first, rebuilt)

    template = recurse(tuple(samples), ())

    # merge holes whose per-sample subexpressions agree elementwise
    final_of_raw: dict[int, int] = {}
    infos: list[tuple[tuple[Expr, ...], list[Path]]] = []
    for raw_id, (path, nodes) in enumerate(raw):
        for fid, (vec, paths) in enumerate(infos):
            if len(vec) == len(nodes) and all(a == b for a, b in zip(vec, nodes)):
                final_of_raw[raw_id] = fid
                paths.append(path)
                break
        else:
            final_of_raw[raw_id] = len(infos)
            infos.append((nodes, [path]))

    def renumber(e: Expr) -> Expr:
        if isinstance(e, Hole):
            return Hole(final_of_raw[e.hole_id])
        kids = children(e)
        if not kids:
            return e
        return replace_children(e, [renumber(k) for k in kids])

    holes = tuple(
        HoleInfo(fid, vec, tuple(paths)) for fid, (vec, paths) in enumerate(infos)
    )
    return Generalization(renumber(template), holes)


def substitute_holes(template: Expr, replacements: dict[int, Expr]) -> Expr:
    """Template with each hole replaced; replacements must cover every hole."""
    if isinstance(template, Hole):
        return replacements[template.hole_id]
    kids = children(template)
    if not kids:
        return template
    return replace_children(template, [substitute_holes(k, replacements) for k in kids])


def instantiate(g: Generalization, sample_index: int) -> Expr:
    """Rebuild sample i from the template (the generalization's soundness check)."""
    return substitute_holes(
        g.template, {h.hole_id: h.subexprs[sample_index] for h in g.holes}
    )


def infer_signature(g: Generalization, return_values: Sequence[Value],
                    evaluate: Callable[[Expr], Value],
                    enum_limit: int = 8) -> Signature:
    """Parameter and return types from a generalization's concrete values."""
    hole_values = [[evaluate(sub) for sub in h.subexprs] for h in g.holes]
    return signature_from_values(hole_values, return_values, enum_limit)


# --- synthesis --------------------------------------------------------------


@dataclass(frozen=True)
class SynthesizedFunction:
    name: str
    params: tuple[tuple[str, SemType], ...]  # first-occurrence order
    purpose: str
    body: Expr
    variable_tests: tuple[TestDef, ...]
    fresh_tests: tuple[TestDef, ...]
    constants: tuple[ConstantDef, ...]  # the Step-1 definitions, verbatim
    signature: Signature
    warnings: tuple[str, ...] = ()


def _default_names(types: Sequence[SemType]) -> list[str]:
    names: list[str] = []
    counts: dict[str, int] = {}

    def pick(base: str, numbered_from_one: bool) -> str:
        counts[base] = counts.get(base, 0) + 1
        n = counts[base]
        if numbered_from_one:
            return f"{base}{n}"
        return base if n == 1 else f"{base}{n}"

    for t in types:
        if isinstance(t, (NonNegReal, Real)):
            names.append(pick("n", True))
        elif isinstance(t, (StringEnum, StringAny)):
            names.append(pick("a-string", False))
        elif isinstance(t, Boolean):
            names.append(pick("a-boolean", False))
        elif isinstance(t, PosnT):
            names.append(pick("a-posn", False))
        elif isinstance(t, ImageT):
            names.append(pick("an-image", False))
        else:
            names.append(pick("a-value", False))
    return names


def synthesize(samples: Sequence[tuple[str, Expr]],
               fn_name: str,
               evaluate: Callable[[Expr], Value],
               param_names: Optional[Sequence[str]] = None,
               atomic_forms: frozenset[str] = DEFAULT_ATOMIC_FORMS,
               purpose: Optional[str] = None) -> SynthesizedFunction:
    """Derive a function, its parameters, and its variable-based tests.

    samples are (constant-name, expression) pairs from Step 1; evaluate must
    resolve an expression against the program the samples came from.
    """
    if len(samples) < 2:
        raise ValueError("synthesis needs at least 2 samples")
    g = generalize([expr for _, expr in samples], atomic_forms)
    if not g.holes:
        raise NoDifferenceError(
            "the samples have no differences; define a constant instead"
        )
    return_values = [evaluate(expr) for _, expr in samples]
    signature = infer_signature(g, return_values, evaluate)
    param_types = list(signature.param_types)

    if param_names is not None:
        if len(param_names) != len(g.holes):
            raise ValueError(
                f"expected {len(g.holes)} parameter names, got {len(param_names)}"
            )
        names = list(param_names)
    else:
        names = _default_names(param_types)
    warnings = tuple(
        f"parameter name {n} is not descriptive; prefer a full word"
        for n in names
        if len(n) == 1
    )

    body = substitute_holes(
        g.template, {h.hole_id: VarRef(n) for h, n in zip(g.holes, names)}
    )
    variable_tests = []
    for i, (const_name, _) in enumerate(samples):
        call = App(fn_name, tuple(h.subexprs[i] for h in g.holes))
        variable_tests.append(TestDef("expect", call, VarRef(const_name), None))
    constants = tuple(ConstantDef(name, expr) for name, expr in samples)
    if purpose is None:
        purpose = f"To compute the result for the given {_join_names(names)}"
    return SynthesizedFunction(
        name=fn_name,
        params=tuple(zip(names, param_types)),
        purpose=purpose,
        body=body,
        variable_tests=tuple(variable_tests),
        fresh_tests=(),
        constants=constants,
        signature=signature,
        warnings=warnings,
    )


def _join_names(names: Sequence[str]) -> str:
    if len(names) == 1:
        return names[0]
    return ", ".join(names[:-1]) + " and " + names[-1]


def generate_scaffold(sf: SynthesizedFunction,
                      signature: Optional[Signature] = None,
                      render_signature_line: Optional[Callable[[Signature], str]] = None) -> str:
    """Emit the recipe-ordered program text for a synthesized function."""
    sig = signature if signature is not None else sf.signature
    sig_line = (
        render_signature_line(sig) if render_signature_line
        else render_signature(sig)
    )
    chunks = [print_definition(c) for c in sf.constants]
    chunks.extend(print_definition(t) for t in sf.variable_tests)
    chunks.extend(print_definition(t) for t in sf.fresh_tests)
    if not sf.fresh_tests:
        chunks.append("; TODO: add tests with new concrete values")
    fn = FunctionDef(
        sf.name,
        tuple(n for n, _ in sf.params),
        sf.body,
        CommentBlock((f"; {sig_line}", f"; Purpose: {sf.purpose}")),
    )
    chunks.append(print_definition(fn))
    return "\n\n".join(chunks) + "\n"

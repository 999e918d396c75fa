"""Nine-step audit of a function against the design recipe.

Each step gets an independent verdict with source-anchored diagnostics, so
feedback can point at the exact test, clause, or comment that needs work.
Warnings (like terse parameter names) never affect the overall outcome.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .abstraction import (
    DEFAULT_ATOMIC_FORMS,
    Generalization,
    Hole,
    ShapeError,
    generalize,
)
from .evaluator import EvalError, Evaluator, run_program
from .rng import Rng
from .semtypes import (
    AliasT,
    AnyT,
    SemType,
    Signature,
    infer_type,
    is_subtype,
    join,
    parse_signature_comment,
    render_type,
)
from .sexpr import (
    AndE,
    App,
    Cond,
    ConstantDef,
    Expr,
    FunctionDef,
    OrE,
    Program,
    SourceSpan,
    TestDef,
    VarRef,
    children,
    walk,
)

STEP_TITLES = {
    1: "sample constants",
    2: "differences identified",
    3: "parameter names",
    4: "signature",
    5: "purpose statement",
    6: "function header",
    7: "tests",
    8: "function body",
    9: "tests run and cover",
}


class UnknownFunction(Exception):
    pass


@dataclass(frozen=True)
class Diagnostic:
    message: str
    span: SourceSpan


@dataclass(frozen=True)
class StepVerdict:
    step: int
    status: str  # pass | warn | fail
    diagnostics: tuple[Diagnostic, ...] = ()


@dataclass(frozen=True)
class RecipeReport:
    function_name: str
    verdicts: tuple[StepVerdict, ...]

    @property
    def overall(self) -> str:
        return "fail" if any(v.status == "fail" for v in self.verdicts) else "pass"

    def verdict(self, step: int) -> StepVerdict:
        return self.verdicts[step - 1]


@dataclass(frozen=True)
class CheckConfig:
    atomic_forms: frozenset[str] = DEFAULT_ATOMIC_FORMS
    alias_map: Optional[dict[str, SemType]] = None
    seed: int = 0
    enum_limit: int = 8


def _non_literal(e: Expr) -> bool:
    return any(isinstance(n, (App, Cond, AndE, OrE)) for n in walk(e))


def _names_in_definition_bodies(program: Program) -> set[str]:
    names: set[str] = set()
    for d in program.definitions:
        if isinstance(d, (ConstantDef, FunctionDef)):
            names.update(n.name for n in walk(d.body) if isinstance(n, VarRef))
    return names


@dataclass
class _BodyMatch:
    """Result of walking the function body against the template."""

    param_of_hole: dict[int, str] = field(default_factory=dict)
    shape_mismatch: Optional[SourceSpan] = None
    hole_conflicts: list[Diagnostic] = field(default_factory=list)

    def ok(self) -> bool:
        return self.shape_mismatch is None and not self.hole_conflicts


def _match_body(template: Expr, body: Expr, params: tuple[str, ...],
                header_span: SourceSpan) -> _BodyMatch:
    m = _BodyMatch()
    seen_at_hole: dict[int, Expr] = {}

    def visit(t: Expr, b: Expr) -> bool:
        if isinstance(t, Hole):
            prev = seen_at_hole.get(t.hole_id)
            if prev is None:
                seen_at_hole[t.hole_id] = b
            elif prev != b:
                m.hole_conflicts.append(
                    Diagnostic(
                        "the same difference is filled two different ways", b.span
                    )
                )
                return False
            return True
        if type(t) is not type(b):
            m.shape_mismatch = b.span
            return False
        if isinstance(t, App) and (t.op != b.op or len(t.args) != len(b.args)):
            m.shape_mismatch = b.span
            return False
        if isinstance(t, Cond) and (
            len(t.clauses) != len(b.clauses)
            or (t.else_answer is None) != (b.else_answer is None)
        ):
            m.shape_mismatch = b.span
            return False
        if isinstance(t, (AndE, OrE)) and len(t.args) != len(b.args):
            m.shape_mismatch = b.span
            return False
        tk, bk = children(t), children(b)
        if not tk:
            if t != b:
                m.shape_mismatch = b.span
                return False
            return True
        return all(visit(a, c) for a, c in zip(tk, bk))

    if not visit(template, body):
        return m

    used: dict[str, int] = {}
    for hole_id, expr in seen_at_hole.items():
        if not isinstance(expr, VarRef) or expr.name not in params:
            m.hole_conflicts.append(
                Diagnostic("a difference must be filled by a parameter", expr.span)
            )
            continue
        if expr.name in used:
            m.hole_conflicts.append(
                Diagnostic(
                    f"parameter {expr.name} stands for two different differences",
                    expr.span,
                )
            )
            continue
        used[expr.name] = hole_id
        m.param_of_hole[hole_id] = expr.name
    for p in params:
        if p not in used and m.ok():
            m.hole_conflicts.append(
                Diagnostic(f"parameter {p} is never used in the body", header_span)
            )
    return m


def check_recipe(program: Program, fn_name: str,
                 config: CheckConfig = CheckConfig()) -> RecipeReport:
    """Audit fn_name against the nine steps; raises UnknownFunction."""
    fn = program.functions().get(fn_name)
    if fn is None:
        raise UnknownFunction(f"{fn_name} is not defined")

    verdicts: dict[int, StepVerdict] = {}

    def verdict(step: int, fails: list[Diagnostic], warns: list[Diagnostic] = ()):
        if fails:
            verdicts[step] = StepVerdict(step, "fail", tuple(fails) + tuple(warns))
        elif warns:
            verdicts[step] = StepVerdict(step, "warn", tuple(warns))
        else:
            verdicts[step] = StepVerdict(step, "pass")

    # shared discovery -------------------------------------------------------
    tests_of_fn = [
        t for t in program.tests()
        if isinstance(t.actual, App) and t.actual.op == fn_name
    ]
    expected_names_of_fn = {
        t.expected.name for t in tests_of_fn if isinstance(t.expected, VarRef)
    }
    expected_names_anywhere = {
        t.expected.name for t in program.tests() if isinstance(t.expected, VarRef)
    }
    referenced = _names_in_definition_bodies(program)
    candidates = [
        d for d in program.definitions
        if isinstance(d, ConstantDef) and d.name not in referenced
    ]
    family = [
        c for c in candidates
        if _non_literal(c.body) and c.name in expected_names_of_fn
    ]
    orphans = [
        c for c in candidates
        if _non_literal(c.body) and c.name not in expected_names_anywhere
    ]

    # step 1: at least two non-trivial sample constants ----------------------
    fails = []
    for c in candidates:
        if not _non_literal(c.body) and c.name in expected_names_of_fn:
            fails.append(
                Diagnostic(
                    f"{c.name} must demonstrate how a value is computed, "
                    "not just state it",
                    c.span,
                )
            )
    if len(family) + len(orphans) < 2:
        fails.append(
            Diagnostic(
                f"found {len(family) + len(orphans)} sample constants for "
                f"{fn_name}; at least 2 are needed",
                fn.span,
            )
        )
    verdict(1, fails)
    # only test-anchored constants shape the generalization; orphans are
    # step-7 business
    samples = sorted(family, key=program.definitions.index)

    # step 2: the samples generalize -----------------------------------------
    gen: Optional[Generalization] = None
    fails = []
    if len(samples) >= 2:
        try:
            gen = generalize([c.body for c in samples], config.atomic_forms)
            if not gen.holes:
                fails.append(
                    Diagnostic(
                        "the samples are identical; there are no differences "
                        "to identify",
                        samples[0].span,
                    )
                )
                gen = None
        except ShapeError as err:
            fails.append(Diagnostic(err.message, err.spans[0]))
            fails.append(Diagnostic(err.message, err.spans[1]))
    else:
        fails.append(
            Diagnostic("not enough samples to identify differences", fn.span)
        )
    verdict(2, fails)

    # step 3: one parameter per difference, descriptive names ----------------
    fails, warns = [], []
    if gen is not None and len(fn.params) != len(gen.holes):
        fails.append(
            Diagnostic(
                f"the samples have {len(gen.holes)} differences but "
                f"{fn_name} has {len(fn.params)} parameters",
                fn.span,
            )
        )
    for p in fn.params:
        if len(p) == 1:
            warns.append(
                Diagnostic(
                    f"parameter name {p} is not descriptive; prefer a full word",
                    fn.span,
                )
            )
    verdict(3, fails, warns)

    # steps 6 and 8: header and body against the template --------------------
    match = None
    fails6, fails8, warns6 = [], [], []
    if gen is not None:
        if len(fn.params) != len(gen.holes):
            fails6.append(
                Diagnostic(
                    f"header must name exactly {len(gen.holes)} parameters",
                    fn.span,
                )
            )
        match = _match_body(gen.template, fn.body, fn.params, fn.span)
        if match.shape_mismatch is not None:
            fails8.append(
                Diagnostic(
                    "the body does not follow the shape of the sample expressions",
                    match.shape_mismatch,
                )
            )
            warns6.append(
                Diagnostic(
                    "parameter usage cannot be checked against the samples",
                    fn.span,
                )
            )
        elif match.hole_conflicts:
            fails6.extend(match.hole_conflicts)
            fails8.extend(match.hole_conflicts)
    else:
        warns6.append(Diagnostic("no generalization to compare against", fn.span))
        fails8.append(Diagnostic("no generalization to compare against", fn.span))
    verdict(6, fails6, warns6)
    verdict(8, fails8)

    # holes in header-parameter order, via the body bijection when it exists
    hole_order: Optional[list[int]] = None
    if gen is not None and len(fn.params) == len(gen.holes):
        if match is not None and match.ok() and \
                len(match.param_of_hole) == len(gen.holes):
            hole_of_param = {p: h for h, p in match.param_of_hole.items()}
            hole_order = [hole_of_param[p] for p in fn.params]
        else:
            hole_order = [h.hole_id for h in gen.holes]

    # evaluation shared by steps 4, 7, 9 -------------------------------------
    eval_err: Optional[EvalError] = None
    evaluator = Evaluator(program)
    try:
        evaluator.eval_constants(Rng(config.seed))
    except EvalError as err:
        eval_err = err
    tests = coverage = None
    if eval_err is None:
        tests, coverage = run_program(program, config.seed)

    # step 4: signature comment present and compatible -----------------------
    fails = []
    declared = parse_signature_comment(fn.comments.lines, config.alias_map)
    if declared is None:
        fails.append(
            Diagnostic(f"no signature comment found before {fn_name}", fn.span)
        )
    elif declared.arity != len(fn.params):
        fails.append(
            Diagnostic(
                f"signature lists {declared.arity} parameter types but "
                f"{fn_name} has {len(fn.params)} parameters",
                fn.span,
            )
        )
    elif gen is not None and eval_err is None and hole_order is not None:
        try:
            inferred = _inferred_signature(evaluator, gen, samples, hole_order, config)
            fails.extend(_signature_compat(declared, inferred, fn))
        except EvalError as err:
            fails.append(Diagnostic(f"cannot infer types: {err.message}", err.span))
    elif eval_err is not None:
        fails.append(
            Diagnostic(
                f"cannot infer types; program does not evaluate: {eval_err.message}",
                eval_err.span,
            )
        )
    verdict(4, fails)

    # step 5: purpose statement ----------------------------------------------
    has_purpose = any(
        line.lstrip("; \t").lower().startswith("purpose:")
        for line in fn.comments.lines
    )
    verdict(5, [] if has_purpose else [
        Diagnostic(f"no '; Purpose:' comment found before {fn_name}", fn.span)
    ])

    # step 7: variable-based tests, fresh values, clause coverage ------------
    verdict(7, _check_tests(
        program, fn, fn_name, tests_of_fn, samples, orphans, gen, hole_order,
        coverage,
    ))

    # step 9: everything passes, nothing in the body left uncovered ----------
    fails = []
    if eval_err is not None:
        fails.append(
            Diagnostic(
                f"program does not evaluate: {eval_err.message}", eval_err.span
            )
        )
    else:
        for r in tests.records:
            if r.status != "pass":
                fails.append(
                    Diagnostic(
                        f"test fails: actual {r.actual}, expected {r.expected}",
                        r.span,
                    )
                )
        for span in coverage.uncovered_for(fn_name):
            fails.append(
                Diagnostic("this expression is never evaluated by any test", span)
            )
    verdict(9, fails)

    return RecipeReport(fn_name, tuple(verdicts[i] for i in range(1, 10)))


def _inferred_signature(evaluator: Evaluator, gen: Generalization,
                        samples: list[ConstantDef], hole_order: list[int],
                        config: CheckConfig) -> Signature:
    by_id = {h.hole_id: h for h in gen.holes}
    hole_vecs = []
    for hole_id in hole_order:
        vec = []
        for sub in by_id[hole_id].subexprs:
            value, _ = evaluator.evaluate(sub, {}, Rng(config.seed))
            vec.append(value)
        hole_vecs.append(vec)
    returns = [evaluator.globals[c.name] for c in samples]
    return Signature(
        tuple(infer_type(v, config.enum_limit) for v in hole_vecs),
        infer_type(returns, config.enum_limit),
    )


def _signature_compat(declared: Signature, inferred: Signature,
                      fn: FunctionDef) -> list[Diagnostic]:
    fails: list[Diagnostic] = []
    alias_bindings: dict[str, list[SemType]] = {}
    positions = list(zip(declared.param_types, inferred.param_types)) + [
        (declared.return_type, inferred.return_type)
    ]
    for idx, (dec, inf) in enumerate(positions):
        where = "return type" if idx == len(positions) - 1 else f"parameter {idx + 1}"
        if isinstance(dec, AliasT):
            alias_bindings.setdefault(dec.name, []).append(inf)
            continue
        if not is_subtype(inf, dec):
            fails.append(
                Diagnostic(
                    f"{where}: values are {render_type(inf)}, but the "
                    f"signature declares {render_type(dec)}",
                    fn.span,
                )
            )
    for alias, types in alias_bindings.items():
        joined: SemType = types[0]
        for t in types[1:]:
            joined = join(joined, t)
        if isinstance(joined, AnyT) and not any(isinstance(t, AnyT) for t in types):
            fails.append(
                Diagnostic(
                    f"alias {alias} stands for incompatible kinds of values",
                    fn.span,
                )
            )
    return fails


def _check_tests(program: Program, fn: FunctionDef, fn_name: str,
                 tests_of_fn: list[TestDef], samples: list[ConstantDef],
                 orphans: list[ConstantDef], gen: Optional[Generalization],
                 hole_order: Optional[list[int]], coverage) -> list[Diagnostic]:
    fails: list[Diagnostic] = []
    if not tests_of_fn:
        fails.append(
            Diagnostic(f"no test applies {fn_name}", fn.span)
        )
    for c in orphans:
        fails.append(
            Diagnostic(
                f"sample constant {c.name} is never used as the expected "
                "value of any test",
                c.span,
            )
        )

    sample_arg_tuples: list[tuple[Expr, ...]] = []
    if gen is not None and hole_order is not None:
        by_id = {h.hole_id: h for h in gen.holes}
        for i, c in enumerate(samples):
            expected_args = tuple(by_id[h].subexprs[i] for h in hole_order)
            sample_arg_tuples.append(expected_args)
            matching = [
                t for t in tests_of_fn
                if isinstance(t.expected, VarRef) and t.expected.name == c.name
            ]
            if not matching:
                fails.append(
                    Diagnostic(
                        f"sample constant {c.name} is never used as the "
                        f"expected value of a test of {fn_name}",
                        c.span,
                    )
                )
                continue
            if not any(t.actual.args == expected_args for t in matching):
                fails.append(
                    Diagnostic(
                        f"the test for {c.name} must pass that sample's values "
                        f"to {fn_name} in header order",
                        matching[0].span,
                    )
                )

    if tests_of_fn and gen is not None:
        fresh = [
            t for t in tests_of_fn
            if tuple(t.actual.args) not in sample_arg_tuples
        ]
        if not fresh:
            fails.append(
                Diagnostic(
                    "add at least one test with concrete values not drawn "
                    "from the samples",
                    fn.span,
                )
            )

    if isinstance(fn.body, Cond) and coverage is not None:
        covered = coverage.covered_node_ids
        for idx, clause in enumerate(fn.body.clauses, start=1):
            if clause.answer.node_id not in covered:
                fails.append(
                    Diagnostic(
                        f"no test exercises cond clause {idx}", clause.answer.span
                    )
                )
        if fn.body.else_answer is not None and \
                fn.body.else_answer.node_id not in covered:
            fails.append(
                Diagnostic(
                    "no test exercises the else clause", fn.body.else_answer.span
                )
            )
    elif isinstance(fn.body, Cond) and coverage is None:
        fails.append(
            Diagnostic("cannot check clause coverage; program does not evaluate",
                       fn.span)
        )
    return fails


# --- report rendering --------------------------------------------------------


def report_to_json(report: RecipeReport) -> dict:
    return {
        "function": report.function_name,
        "steps": [
            {
                "step": v.step,
                "status": v.status,
                "diagnostics": [
                    {"message": d.message, "line": d.span.line, "col": d.span.column}
                    for d in v.diagnostics
                ],
            }
            for v in report.verdicts
        ],
        "overall": report.overall,
    }


def report_to_text(report: RecipeReport) -> str:
    lines = [f"recipe check for {report.function_name}"]
    for v in report.verdicts:
        mark = {"pass": "ok", "warn": "warn", "fail": "FAIL"}[v.status]
        lines.append(f"  step {v.step} [{mark}] {STEP_TITLES[v.step]}")
        for d in v.diagnostics:
            lines.append(f"      line {d.span.line}: {d.message}")
    lines.append(f"overall: {report.overall}")
    return "\n".join(lines)

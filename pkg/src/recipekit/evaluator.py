"""Big-step evaluator, the three check forms, and expression coverage.

Evaluation is exact: numbers are rationals and check-expect compares values
structurally with no floating drift. Every AST node is marked covered the
moment its evaluation begins, which is what makes untested cond branches
visible in the coverage report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional

from .rng import Rng
from .sexpr import (
    AndE,
    App,
    BooleanLit,
    Cond,
    ConstantDef,
    Expr,
    FunctionDef,
    NumberLit,
    OrE,
    Program,
    SourceSpan,
    StringLit,
    TestDef,
    VarRef,
    children,
    print_expr,
    span_text,
)
from .values import (
    BoolV,
    Circ,
    EmptyScene,
    ImageV,
    NumV,
    Place,
    PosnV,
    Rect,
    Rotate,
    StrV,
    Value,
    image_height,
    image_width,
    render_value,
)


class EvalError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.message = message
        self.span = span


BUILTIN_NAMES = frozenset(
    "+ - * / abs min max expt sqr < <= > >= = string=? not "
    "make-posn posn-x posn-y random rectangle circle empty-scene "
    "rotate place-image image-width image-height".split()
)

_IMAGE_MODES = ("solid", "outline")


class Evaluator:
    """Evaluates expressions of one program, accumulating node coverage.

    Constants are not evaluated until eval_constants runs; tests and ad hoc
    expressions may then resolve every definition in the program.
    """

    def __init__(self, program: Program):
        self.program = program
        self.functions = program.functions()
        self.globals: dict[str, Value] = {}
        self.covered: set[int] = set()
        # while constants evaluate, only earlier definitions are visible
        self._visible: Optional[set[str]] = None

    # -- public entry points

    def eval_constants(self, rng: Rng) -> Rng:
        """Evaluate every constant definition in source order."""
        self._visible = set()
        try:
            for d in self.program.definitions:
                if isinstance(d, FunctionDef):
                    self._visible.add(d.name)
                elif isinstance(d, ConstantDef):
                    value, rng = self._eval(d.body, {}, rng)
                    self.globals[d.name] = value
                    self._visible.add(d.name)
        finally:
            self._visible = None
        return rng

    def evaluate(self, expr: Expr, env: Mapping[str, Value], rng: Rng) -> tuple[Value, Rng]:
        """Evaluate one expression under extra local bindings."""
        return self._eval(expr, dict(env), rng)

    # -- core recursion

    def _eval(self, e: Expr, env: dict[str, Value], rng: Rng) -> tuple[Value, Rng]:
        self.covered.add(e.node_id)
        if isinstance(e, NumberLit):
            return NumV(e.value), rng
        if isinstance(e, StringLit):
            return StrV(e.value), rng
        if isinstance(e, BooleanLit):
            return BoolV(e.value), rng
        if isinstance(e, VarRef):
            return self._lookup(e, env), rng
        if isinstance(e, App):
            return self._apply(e, env, rng)
        if isinstance(e, Cond):
            return self._cond(e, env, rng)
        if isinstance(e, (AndE, OrE)):
            return self._junction(e, env, rng)
        raise TypeError(f"not an expression: {e!r}")

    def _visible_name(self, name: str) -> bool:
        return self._visible is None or name in self._visible

    def _lookup(self, e: VarRef, env: dict[str, Value]) -> Value:
        if e.name in env:
            return env[e.name]
        if e.name in self.globals:
            return self.globals[e.name]
        if e.name in self.functions:
            if not self._visible_name(e.name):
                raise EvalError(f"{e.name} is used before its definition", e.span)
            raise EvalError(f"{e.name} is a function, not a value", e.span)
        if self._visible is not None and any(
            isinstance(d, ConstantDef) and d.name == e.name
            for d in self.program.definitions
        ):
            raise EvalError(f"{e.name} is used before its definition", e.span)
        raise EvalError(f"{e.name} is not defined", e.span)

    def _apply(self, e: App, env: dict[str, Value], rng: Rng) -> tuple[Value, Rng]:
        if e.op in env:
            raise EvalError(f"{e.op} is a parameter, not a function", e.span)
        fn = self.functions.get(e.op)
        if fn is not None and not self._visible_name(e.op):
            raise EvalError(f"{e.op} is used before its definition", e.span)
        if fn is not None:
            if len(e.args) != len(fn.params):
                raise EvalError(
                    f"{e.op} expects {len(fn.params)} argument"
                    f"{'s' if len(fn.params) != 1 else ''}, got {len(e.args)}",
                    e.span,
                )
            args = []
            for a in e.args:
                v, rng = self._eval(a, env, rng)
                args.append(v)
            return self._eval(fn.body, dict(zip(fn.params, args)), rng)
        if e.op in BUILTIN_NAMES:
            return self._builtin(e, env, rng)
        if e.op in self.globals or fn is not None:
            raise EvalError(f"{e.op} is not a function", e.span)
        raise EvalError(f"{e.op} is not defined", e.span)

    def _cond(self, e: Cond, env: dict[str, Value], rng: Rng) -> tuple[Value, Rng]:
        for clause in e.clauses:
            q, rng = self._eval(clause.question, env, rng)
            if not isinstance(q, BoolV):
                raise EvalError(
                    "cond question must produce a boolean", clause.question.span
                )
            if q.value:
                return self._eval(clause.answer, env, rng)
        if e.else_answer is not None:
            return self._eval(e.else_answer, env, rng)
        raise EvalError("all cond questions are false", e.span)

    def _junction(self, e, env: dict[str, Value], rng: Rng) -> tuple[Value, Rng]:
        stop = isinstance(e, OrE)  # or stops at #true, and stops at #false
        for arg in e.args:
            v, rng = self._eval(arg, env, rng)
            if not isinstance(v, BoolV):
                name = "or" if stop else "and"
                raise EvalError(f"{name} expects boolean expressions", arg.span)
            if v.value == stop:
                return BoolV(stop), rng
        return BoolV(not stop), rng

    # -- builtins

    def _builtin(self, e: App, env: dict[str, Value], rng: Rng) -> tuple[Value, Rng]:
        args = []
        for a in e.args:
            v, rng = self._eval(a, env, rng)
            args.append(v)
        op = e.op

        def need(count: Optional[int] = None, least: Optional[int] = None) -> None:
            if count is not None and len(args) != count:
                raise EvalError(f"{op} expects {count} arguments", e.span)
            if least is not None and len(args) < least:
                raise EvalError(f"{op} expects at least {least} arguments", e.span)

        def nums() -> list[Fraction]:
            out = []
            for a, v in zip(e.args, args):
                if not isinstance(v, NumV):
                    raise EvalError(f"{op} expects a number", a.span)
                out.append(v.value)
            return out

        if op in ("+", "*"):
            need(least=2)
            ns = nums()
            total = Fraction(0 if op == "+" else 1)
            for n in ns:
                total = total + n if op == "+" else total * n
            return NumV(total), rng
        if op == "-":
            need(least=1)
            ns = nums()
            if len(ns) == 1:
                return NumV(-ns[0]), rng
            total = ns[0]
            for n in ns[1:]:
                total -= n
            return NumV(total), rng
        if op == "/":
            need(least=2)
            ns = nums()
            total = ns[0]
            for a, n in zip(e.args[1:], ns[1:]):
                if n == 0:
                    raise EvalError("division by zero", a.span)
                total /= n
            return NumV(total), rng
        if op in ("abs", "sqr"):
            need(count=1)
            (n,) = nums()
            return NumV(abs(n) if op == "abs" else n * n), rng
        if op in ("min", "max"):
            need(least=1)
            ns = nums()
            return NumV(min(ns) if op == "min" else max(ns)), rng
        if op == "expt":
            need(count=2)
            base, exp = nums()
            if exp.denominator != 1:
                raise EvalError("expt expects an integer exponent", e.args[1].span)
            if base == 0 and exp < 0:
                raise EvalError("division by zero", e.span)
            return NumV(base ** int(exp)), rng
        if op in ("<", "<=", ">", ">=", "="):
            need(least=2)
            ns = nums()
            cmp: Callable[[Fraction, Fraction], bool] = {
                "<": lambda a, b: a < b,
                "<=": lambda a, b: a <= b,
                ">": lambda a, b: a > b,
                ">=": lambda a, b: a >= b,
                "=": lambda a, b: a == b,
            }[op]
            ok = all(cmp(a, b) for a, b in zip(ns, ns[1:]))
            return BoolV(ok), rng
        if op == "string=?":
            need(least=2)
            for a, v in zip(e.args, args):
                if not isinstance(v, StrV):
                    raise EvalError("string=? expects a string", a.span)
            first = args[0]
            return BoolV(all(v == first for v in args[1:])), rng
        if op == "not":
            need(count=1)
            if not isinstance(args[0], BoolV):
                raise EvalError("not expects a boolean", e.args[0].span)
            return BoolV(not args[0].value), rng
        if op == "make-posn":
            need(count=2)
            x, y = args
            if not isinstance(x, NumV) or not isinstance(y, NumV):
                raise EvalError("make-posn expects two numbers", e.span)
            return PosnV(x, y), rng
        if op in ("posn-x", "posn-y"):
            need(count=1)
            if not isinstance(args[0], PosnV):
                raise EvalError(f"{op} expects a posn", e.args[0].span)
            return (args[0].x if op == "posn-x" else args[0].y), rng
        if op == "random":
            need(count=1)
            if not isinstance(args[0], NumV) or args[0].value.denominator != 1 \
                    or args[0].value <= 0:
                raise EvalError("random expects a positive integer", e.args[0].span)
            rng, value = rng.next_int(int(args[0].value))
            return NumV(Fraction(value)), rng
        return self._image_builtin(e, args, rng)

    def _image_builtin(self, e: App, args: list[Value], rng: Rng) -> tuple[Value, Rng]:
        op = e.op

        def dim(idx: int, allow_negative: bool = False) -> Fraction:
            v = args[idx]
            if not isinstance(v, NumV):
                raise EvalError(f"{op} expects a number", e.args[idx].span)
            if not allow_negative and v.value < 0:
                raise EvalError(f"{op} expects a non-negative number", e.args[idx].span)
            return v.value

        def text(idx: int, mode: bool = False) -> str:
            v = args[idx]
            if not isinstance(v, StrV):
                raise EvalError(f"{op} expects a string", e.args[idx].span)
            if mode and v.value not in _IMAGE_MODES:
                raise EvalError(
                    f'{op} expects "solid" or "outline"', e.args[idx].span
                )
            return v.value

        def image(idx: int):
            v = args[idx]
            if not isinstance(v, ImageV):
                raise EvalError(f"{op} expects an image", e.args[idx].span)
            return v.image

        def need(count: int) -> None:
            if len(args) != count:
                raise EvalError(f"{op} expects {count} arguments", e.span)

        if op == "rectangle":
            need(4)
            return ImageV(Rect(dim(0), dim(1), text(2, mode=True), text(3))), rng
        if op == "circle":
            need(3)
            return ImageV(Circ(dim(0), text(1, mode=True), text(2))), rng
        if op == "empty-scene":
            need(2)
            return ImageV(EmptyScene(dim(0), dim(1))), rng
        if op == "rotate":
            need(2)
            return ImageV(Rotate(dim(0, allow_negative=True) % 360, image(1))), rng
        if op == "place-image":
            need(4)
            return (
                ImageV(Place(image(0), dim(1, True), dim(2, True), image(3))),
                rng,
            )
        if op == "image-width":
            need(1)
            return NumV(image_width(image(0))), rng
        if op == "image-height":
            need(1)
            return NumV(image_height(image(0))), rng
        raise EvalError(f"{op} is not defined", e.span)


def evaluate(expr: Expr, env: Mapping[str, Value], rng: Rng,
             program: Program = Program(())) -> tuple[Value, Rng]:
    """One-shot evaluation against a program's definitions (constants included)."""
    ev = Evaluator(program)
    rng = ev.eval_constants(rng)
    return ev.evaluate(expr, env, rng)


# --- test engine ------------------------------------------------------------


@dataclass(frozen=True)
class TestRecord:
    __test__ = False

    kind: str  # expect | within | random
    status: str  # pass | fail | error
    actual: str
    expected: str
    span: SourceSpan


@dataclass(frozen=True)
class TestReport:
    __test__ = False

    records: tuple[TestRecord, ...]

    @property
    def total(self) -> int:
        return len(self.records)

    @property
    def passed(self) -> int:
        return sum(1 for r in self.records if r.status == "pass")

    @property
    def failed(self) -> int:
        return self.total - self.passed

    def all_passed(self) -> bool:
        return self.failed == 0


@dataclass(frozen=True)
class CoverageReport:
    covered_node_ids: frozenset[int]
    # (function name, uncovered spans in its body), functions in source order
    uncovered_by_function: tuple[tuple[str, tuple[SourceSpan, ...]], ...]

    def uncovered_spans(self) -> list[SourceSpan]:
        return [s for _, spans in self.uncovered_by_function for s in spans]

    def fully_covered(self) -> bool:
        return not self.uncovered_spans()

    def uncovered_for(self, fn_name: str) -> tuple[SourceSpan, ...]:
        for name, spans in self.uncovered_by_function:
            if name == fn_name:
                return spans
        return ()


def _within(actual: Value, expected: Value, tol: Fraction) -> bool:
    if isinstance(actual, NumV) and isinstance(expected, NumV):
        return abs(actual.value - expected.value) <= tol
    if isinstance(actual, PosnV) and isinstance(expected, PosnV):
        return _within(actual.x, expected.x, tol) and _within(actual.y, expected.y, tol)
    if isinstance(actual, ImageV) and isinstance(expected, ImageV):
        return _image_within(actual.image, expected.image, tol)
    return actual == expected


def _image_within(a, b, tol: Fraction) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, EmptyScene):
        return abs(a.width - b.width) <= tol and abs(a.height - b.height) <= tol
    if isinstance(a, Rect):
        return (
            abs(a.width - b.width) <= tol
            and abs(a.height - b.height) <= tol
            and (a.mode, a.color) == (b.mode, b.color)
        )
    if isinstance(a, Circ):
        return abs(a.radius - b.radius) <= tol and (a.mode, a.color) == (b.mode, b.color)
    if isinstance(a, Rotate):
        return abs(a.degrees - b.degrees) <= tol and _image_within(a.image, b.image, tol)
    return (
        abs(a.x - b.x) <= tol
        and abs(a.y - b.y) <= tol
        and _image_within(a.image, b.image, tol)
        and _image_within(a.base, b.base, tol)
    )


def _run_test(ev: Evaluator, t: TestDef, rng: Rng) -> tuple[TestRecord, Rng]:
    def record(status: str, actual: str, expected: str) -> TestRecord:
        return TestRecord(t.kind, status, actual, expected, t.span)

    try:
        if t.kind == "random":
            # both sides replay the same stream; the run continues after
            # the actual side
            start = rng
            actual, rng = ev.evaluate(t.actual, {}, start)
            expected, _ = ev.evaluate(t.expected, {}, start)
            ok = actual == expected
        else:
            actual, rng = ev.evaluate(t.actual, {}, rng)
            expected, rng = ev.evaluate(t.expected, {}, rng)
            if t.kind == "within":
                tol, rng = ev.evaluate(t.tolerance, {}, rng)
                if not isinstance(tol, NumV) or tol.value < 0:
                    raise EvalError(
                        "check-within expects a non-negative tolerance",
                        t.tolerance.span,
                    )
                ok = _within(actual, expected, tol.value)
            else:
                ok = actual == expected
        return (
            record("pass" if ok else "fail", render_value(actual), render_value(expected)),
            rng,
        )
    except EvalError as err:
        detail = f"error: {err.message}"
        return record("error", detail, print_expr(t.expected)), rng


def _coverage(ev: Evaluator) -> CoverageReport:
    def maximal_uncovered(e: Expr, out: list[SourceSpan]) -> None:
        # report whole untouched subtrees once, not every node inside them
        if e.node_id not in ev.covered:
            out.append(e.span)
            return
        for child in children(e):
            maximal_uncovered(child, out)

    grouped = []
    for d in ev.program.definitions:
        if not isinstance(d, FunctionDef):
            continue
        missing: list[SourceSpan] = []
        maximal_uncovered(d.body, missing)
        grouped.append((d.name, tuple(missing)))
    return CoverageReport(frozenset(ev.covered), tuple(grouped))


def run_program(program: Program, seed: int = 0) -> tuple[TestReport, CoverageReport]:
    """Evaluate constants, run every check, and report coverage.

    A failing check never stops the run; an error in a constant definition
    propagates as EvalError because nothing after it is trustworthy.
    """
    ev = Evaluator(program)
    rng = Rng(seed)
    rng = ev.eval_constants(rng)
    records = []
    for t in program.tests():
        rec, rng = _run_test(ev, t, rng)
        records.append(rec)
    return TestReport(tuple(records)), _coverage(ev)


def run_report_json(tests: TestReport, coverage: CoverageReport, source: str) -> dict:
    """JSON view of one run; serialize with sort_keys for byte-stable output."""
    return {
        "tests": [
            {
                "kind": r.kind,
                "status": r.status,
                "actual": r.actual,
                "expected": r.expected,
                "line": r.span.line,
            }
            for r in tests.records
        ],
        "coverage": {
            "uncovered": [
                {"line": s.line, "col": s.column, "text": span_text(source, s)}
                for s in coverage.uncovered_spans()
            ]
        },
    }


def run_report_text(tests: TestReport, coverage: CoverageReport, source: str) -> str:
    """Human-readable mirror of run_report_json."""
    lines = []
    for r in tests.records:
        mark = {"pass": "ok", "fail": "FAIL", "error": "ERROR"}[r.status]
        lines.append(f"[{mark}] check-{r.kind} at line {r.span.line}")
        if r.status != "pass":
            lines.append(f"       actual:   {r.actual}")
            lines.append(f"       expected: {r.expected}")
    lines.append(f"{tests.passed}/{tests.total} tests passed")
    if coverage.fully_covered():
        lines.append("all function bodies covered")
    else:
        for name, spans in coverage.uncovered_by_function:
            for s in spans:
                lines.append(
                    f"uncovered in {name}: line {s.line} col {s.column}: "
                    f"{span_text(source, s)}"
                )
    return "\n".join(lines)


def dumps_stable(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))

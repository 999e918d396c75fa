import json
import random
from fractions import Fraction

import pytest

from recipekit.evaluator import (
    EvalError,
    Evaluator,
    dumps_stable,
    evaluate,
    run_program,
    run_report_json,
)
from recipekit.rng import Rng
from recipekit.sexpr import (
    App,
    FunctionDef,
    Program,
    parse_expr,
    parse_program,
    span_text,
)
from recipekit.values import (
    BoolV,
    ImageV,
    NumV,
    Rect,
    Rotate,
    StrV,
    num,
    posn,
)

from .conftest import corpus_program, corpus_text
from .oracles import OracleEvalError, gen_numeric, lcg_reference_stream, oracle_eval


def eval_in(program_source: str, expr_source: str, seed: int = 0):
    program = parse_program(program_source)
    value, _ = evaluate(parse_expr(expr_source), {}, Rng(seed), program)
    return value


def test_rect_area_applied_to_fresh_values():
    value = eval_in(corpus_text("rect-area.rkt"), "(rect-area 2 7)")
    assert value == num(14)


def test_piecewise_corpus_values():
    src = corpus_text("piecewise.rkt")
    assert eval_in(src, "(f 5)") == num(25)
    assert eval_in(src, "(f -3)") == num(-3)
    assert eval_in(src, "(f 6)") == num(26)
    assert eval_in(src, "(absval -7)") == num(7)
    assert eval_in(src, "(absval 0)") == num(0)


def test_move_rocket_corpus_values():
    src = corpus_text("mvrocket.rkt")
    assert eval_in(src, '(move-rocket (make-posn 45 18) "right")') == posn(50, 18)
    assert eval_in(src, '(move-rocket (make-posn 5 15) "up")') == posn(5, 10)


def test_arithmetic_is_exact():
    assert eval_in("", "(* 10 5)") == num(50)
    assert eval_in("", "(/ 1 3)") == NumV(Fraction(1, 3))
    assert eval_in("", "(+ 1/10 2/10)") == NumV(Fraction(3, 10))
    # no floating drift: a tenth added ten times is exactly one
    assert eval_in("", "(+ 1/10 1/10 1/10 1/10 1/10 1/10 1/10 1/10 1/10 1/10)") == num(1)


def test_comparison_chains_and_junctions():
    assert eval_in("", "(< 1 2 3)") == BoolV(True)
    assert eval_in("", "(<= 1 1 0)") == BoolV(False)
    assert eval_in("", "(and (< 1 2) (or (> 0 1) (= 2 2)))") == BoolV(True)


def test_short_circuit_skips_errors():
    # the division by zero is never reached
    assert eval_in("", "(or (= 1 1) (= 1 (/ 1 0)))") == BoolV(True)
    assert eval_in("", "(and (= 1 2) (= 1 (/ 1 0)))") == BoolV(False)


@pytest.mark.parametrize(
    "source,message",
    [
        ("(+ 1 nowhere)", "nowhere is not defined"),
        ("(sqr 1 2)", "sqr expects 1 arguments"),
        ('(+ 1 "two")', "expects a number"),
        ("(cond [(< 2 1) 5])", "all cond questions are false"),
        ("(/ 1 0)", "division by zero"),
        ("(not 5)", "not expects a boolean"),
        ("(cond [5 1])", "cond question must produce a boolean"),
        ('(and #true 3)', "and expects boolean"),
        ("(random 0)", "random expects a positive integer"),
        ("(random 1/2)", "random expects a positive integer"),
        ("(expt 2 1/2)", "expt expects an integer exponent"),
        ("(make-posn 1 \"y\")", "make-posn expects two numbers"),
        ("(posn-x 3)", "posn-x expects a posn"),
    ],
)
def test_eval_errors_carry_spans(source, message):
    with pytest.raises(EvalError) as err:
        eval_in("", source)
    assert message in err.value.message
    assert err.value.span.byte_end > 0


def test_user_function_arity_error():
    with pytest.raises(EvalError, match="expects 2 arguments, got 1"):
        eval_in("(define (f a b) (+ a b))", "(f 1)")


def test_function_name_is_not_a_value():
    with pytest.raises(EvalError, match="is a function, not a value"):
        eval_in("(define (f a) a)", "(+ f 1)")


def test_random_matches_reference_stream():
    program = parse_program("(define (draw n) (random n))")
    ev = Evaluator(program)
    rng = ev.eval_constants(Rng(42))
    drawn = []
    expr = parse_expr("(draw 500)")
    for _ in range(8):
        value, rng = ev.evaluate(expr, {}, rng)
        drawn.append(int(value.value))
    assert drawn == lcg_reference_stream(42, 8, 500)
    assert drawn == [284, 112, 206, 315, 340, 13, 10, 76]  # frozen from the recurrence
    assert all(0 <= v < 500 for v in drawn)


def test_run_program_area_all_pass(area_program):
    tests, coverage = run_program(area_program, 0)
    assert tests.passed == tests.total == 5
    assert coverage.fully_covered()


def test_run_program_expected_mismatch_fails():
    src = corpus_text("rect-area.rkt").replace(
        "(check-expect (rect-area 50 5) 250)",
        "(check-expect (rect-area 10 100) AREA1)",
    )
    tests, _ = run_program(parse_program(src), 0)
    statuses = [r.status for r in tests.records]
    assert statuses.count("fail") == 1
    failing = next(r for r in tests.records if r.status == "fail")
    assert failing.actual == "1000" and failing.expected == "50"


def test_missing_left_test_reports_uncovered_answer():
    src = corpus_text("move-rocket-missing-left.rkt")
    tests, coverage = run_program(parse_program(src), 0)
    assert tests.all_passed()
    spans = coverage.uncovered_for("move-rocket")
    assert [span_text(src, s) for s in spans] == ["(move-rocket-left a-rocket)"]


def test_check_random_reflexivity():
    src = (
        "(define (jitter n) (+ n (random 1000)))\n"
        "(check-random (jitter 1) (jitter 1))\n"
        "(check-random (+ (random 10) (random 10)) (+ (random 10) (random 10)))\n"
    )
    for seed in (0, 7, 123456789):
        tests, _ = run_program(parse_program(src), seed)
        assert tests.all_passed()


def test_check_random_detects_divergence():
    src = "(check-random (random 1000000) (+ (random 1000000) 1))\n"
    tests, _ = run_program(parse_program(src), 3)
    assert tests.records[0].status == "fail"


def test_check_within_recursive_comparison():
    src = (
        "(check-within (make-posn 1 2) (make-posn 101/100 2) 1/100)\n"
        "(check-within (make-posn 1 2) (make-posn 11/10 2) 1/100)\n"
        '(check-within "a" "a" 1/10)\n'
    )
    tests, _ = run_program(parse_program(src), 0)
    assert [r.status for r in tests.records] == ["pass", "fail", "pass"]


def test_check_within_rejects_bad_tolerance():
    tests, _ = run_program(parse_program("(check-within 1 1 (- 0 1))"), 0)
    assert tests.records[0].status == "error"
    tests, _ = run_program(parse_program('(check-within 1 1 "a")'), 0)
    assert tests.records[0].status == "error"


def test_failing_test_does_not_stop_the_run():
    src = "(check-expect (/ 1 0) 1)\n(check-expect (+ 1 1) 2)\n"
    tests, _ = run_program(parse_program(src), 0)
    assert [r.status for r in tests.records] == ["error", "pass"]


def test_constant_error_aborts_run():
    with pytest.raises(EvalError, match="a-rocket is not defined"):
        run_program(corpus_program("mvrocket-raw.rkt"), 0)


def test_constants_cannot_use_later_definitions():
    with pytest.raises(EvalError, match="used before its definition"):
        run_program(parse_program("(define A (f 1))\n(define (f x) x)"), 0)
    with pytest.raises(EvalError, match="used before its definition"):
        run_program(parse_program("(define A B)\n(define B 1)"), 0)


def test_reports_are_deterministic_and_stable():
    src = corpus_text("mvrocket.rkt")
    blobs = set()
    for _ in range(3):
        tests, coverage = run_program(parse_program(src), 99)
        blobs.add(dumps_stable(run_report_json(tests, coverage, src)))
    assert len(blobs) == 1


def test_report_json_schema():
    src = corpus_text("move-rocket-missing-left.rkt")
    tests, coverage = run_program(parse_program(src), 0)
    payload = run_report_json(tests, coverage, src)
    assert set(payload) == {"tests", "coverage"}
    for t in payload["tests"]:
        assert set(t) == {"kind", "status", "actual", "expected", "line"}
    for u in payload["coverage"]["uncovered"]:
        assert set(u) == {"line", "col", "text"}
    json.dumps(payload)  # serializable


def test_coverage_monotone_under_added_tests():
    base = corpus_text("move-rocket-missing-left.rkt")
    _, cov_before = run_program(parse_program(base), 0)
    extended = base + '\n(check-expect (move-rocket (make-posn 32 51) "left") (make-posn 27 51))\n'
    _, cov_after = run_program(parse_program(extended), 0)
    assert cov_before.covered_node_ids <= cov_after.covered_node_ids
    assert cov_after.fully_covered()


def test_constant_evaluation_contributes_coverage():
    # the constant calls the helper, so its body counts as covered
    src = "(define (twice n) (* 2 n))\n(define FOUR (twice 2))\n"
    _, coverage = run_program(parse_program(src), 0)
    assert coverage.fully_covered()


def test_image_dimensions():
    assert eval_in("", '(image-width (rectangle 20 30 "solid" "green"))') == num(20)
    assert eval_in("", '(image-height (circle 7 "solid" "red"))') == num(14)
    assert eval_in("", '(image-width (rotate 90 (rectangle 20 30 "solid" "red")))') == num(30)
    assert eval_in("", '(image-width (rotate 180 (rectangle 20 30 "solid" "red")))') == num(20)
    scene = '(place-image (circle 5 "solid" "red") 10 10 (empty-scene 200 100))'
    assert eval_in("", f"(image-width {scene})") == num(200)
    assert eval_in("", f"(image-height {scene})") == num(100)


def test_image_values_compare_structurally():
    a = eval_in("", '(rotate 90 (rectangle 30 45 "solid" "gray"))')
    b = eval_in("", '(rotate 90 (rectangle 30 45 "solid" "gray"))')
    assert a == b == ImageV(Rotate(Fraction(90), Rect(Fraction(30), Fraction(45), "solid", "gray")))


def test_image_mode_checked():
    with pytest.raises(EvalError, match='"solid" or "outline"'):
        eval_in("", '(rectangle 2 2 "soild" "red")')


def test_posn_components_must_be_numbers():
    assert eval_in("", "(posn-y (make-posn 3 4))") == num(4)
    with pytest.raises(EvalError):
        eval_in("", '(make-posn "a" 1)')


def test_evaluator_agrees_with_oracle():
    rnd = random.Random(4242)
    program = parse_program("")
    ev = Evaluator(program)
    for _ in range(400):
        expr = gen_numeric(rnd, 4)
        expected = oracle_eval(expr, {})
        actual, _ = ev.evaluate(expr, {}, Rng(0))
        assert actual == expected


def test_evaluator_agrees_with_oracle_on_programs_with_globals():
    rnd = random.Random(777)
    env = {"K1": num(3), "K2": NumV(Fraction(-7, 2)), "K3": num(11)}
    src = "(define K1 3)\n(define K2 -3.5)\n(define K3 11)\n"
    program = parse_program(src)
    ev = Evaluator(program)
    ev.eval_constants(Rng(0))

    def with_vars(e, depth=0):
        # graft global references onto random leaves
        from recipekit.sexpr import NumberLit, VarRef, children, replace_children

        if isinstance(e, NumberLit) and rnd.random() < 0.25:
            return VarRef(rnd.choice(list(env)))
        kids = children(e)
        if not kids:
            return e
        return replace_children(e, [with_vars(k, depth + 1) for k in kids])

    for _ in range(200):
        expr = with_vars(gen_numeric(rnd, 3))
        assert ev.evaluate(expr, {}, Rng(0))[0] == oracle_eval(expr, env)


def test_evaluator_agrees_with_oracle_on_user_functions():
    rnd = random.Random(90125)
    for _ in range(150):
        body = gen_numeric(rnd, 3)

        def graft_params(e):
            from recipekit.sexpr import NumberLit, VarRef, children, replace_children

            if isinstance(e, NumberLit) and rnd.random() < 0.3:
                return VarRef(rnd.choice(["a", "b"]))
            kids = children(e)
            if not kids:
                return e
            return replace_children(e, [graft_params(k) for k in kids])

        body = graft_params(body)
        fn = FunctionDef("probe", ("a", "b"), body)
        program = Program((fn,))
        ev = Evaluator(program)
        call = App("probe", (gen_numeric(rnd, 2), gen_numeric(rnd, 2)))
        # parameters may land in divisor position, so both sides must agree
        # on errors as well as on values
        try:
            expected = oracle_eval(call, {}, {"probe": (("a", "b"), body)})
        except OracleEvalError:
            with pytest.raises(EvalError):
                ev.evaluate(call, {}, Rng(0))
            continue
        actual, _ = ev.evaluate(call, {}, Rng(0))
        assert actual == expected


def test_rotation_bounding_boxes():
    assert eval_in("", '(image-height (rotate 270 (rectangle 20 30 "solid" "red")))') == num(20)
    assert eval_in("", '(image-width (rotate 360 (rectangle 20 30 "solid" "red")))') == num(20)
    # a non-right angle gets the rotated bounding box, computed approximately
    tilted = eval_in("", '(image-width (rotate 45 (rectangle 20 30 "solid" "red")))')
    assert abs(float(tilted.value) - (20 + 30) / 2 ** 0.5) < 1e-9


def test_strings_and_booleans_evaluate():
    assert eval_in("", '(string=? "up" "up")') == BoolV(True)
    assert eval_in("", '(string=? "up" "down")') == BoolV(False)
    assert eval_in("", '"hello"') == StrV("hello")
    assert eval_in("", "#true") == BoolV(True)


def test_local_parameter_shadows_global():
    src = "(define x 1)\n(define (f x) (+ x 10))\n"
    assert eval_in(src, "(f 5)") == num(15)


def test_quadratic_substitution():
    # the classic plug-in exercise: y = x^2 + 3x - 10 at x = 10
    src = "(define (y x) (- (+ (sqr x) (* 3 x)) 10))"
    assert eval_in(src, "(y 10)") == num(120)

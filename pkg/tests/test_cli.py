import json

from recipekit.cli import main
from recipekit.sexpr import parse_program

from .conftest import CORPUS_DIR


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_reprints_program(capsys):
    code, out, err = run(capsys, "parse", str(CORPUS_DIR / "rect-area.rkt"))
    assert code == 0 and not err
    assert parse_program(out).functions().keys() == {"rect-area"}


def test_parse_json_lists_definitions(capsys):
    code, out, _ = run(capsys, "parse", str(CORPUS_DIR / "rect-area.rkt"), "--json")
    assert code == 0
    payload = json.loads(out)
    kinds = [d["kind"] for d in payload["definitions"]]
    assert kinds == ["constant"] * 3 + ["test"] * 5 + ["function"]


def test_parse_error_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.rkt"
    bad.write_text("(define A (cond))", encoding="utf-8")
    code, _, err = run(capsys, "parse", str(bad))
    assert code == 2
    assert "cond requires at least one clause" in err
    assert "bad.rkt:1:" in err


def test_missing_file_exits_2(capsys):
    code, _, err = run(capsys, "parse", "no-such-file.rkt")
    assert code == 2 and "no-such-file" in err


def test_test_command_green_corpus(capsys):
    code, out, _ = run(capsys, "test", str(CORPUS_DIR / "rect-area.rkt"))
    assert code == 0
    assert "5/5 tests passed" in out


def test_test_command_flags_uncovered(capsys):
    code, out, _ = run(capsys, "test", str(CORPUS_DIR / "move-rocket-missing-left.rkt"))
    assert code == 1
    assert "uncovered in move-rocket" in out
    assert "(move-rocket-left a-rocket)" in out


def test_test_command_json_schema(capsys):
    code, out, _ = run(
        capsys, "test", str(CORPUS_DIR / "move-rocket-missing-left.rkt"), "--json"
    )
    assert code == 1
    payload = json.loads(out)
    assert {t["status"] for t in payload["tests"]} == {"pass"}
    assert payload["coverage"]["uncovered"][0]["text"] == "(move-rocket-left a-rocket)"


def test_test_command_eval_error_exits_1(capsys):
    code, _, err = run(capsys, "test", str(CORPUS_DIR / "mvrocket-raw.rkt"))
    assert code == 1
    assert "a-rocket is not defined" in err


def test_abstract_prints_reparsable_scaffold(capsys):
    code, out, _ = run(
        capsys, "abstract", str(CORPUS_DIR / "area-samples.rkt"),
        "--name", "rect-area", "--params", "length,width",
    )
    assert code == 0
    program = parse_program(out)
    assert "rect-area" in program.functions()


def test_abstract_json_payload(capsys):
    code, out, _ = run(
        capsys, "abstract", str(CORPUS_DIR / "area-samples.rkt"),
        "--name", "rect-area", "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["signature"] == "NonNegReal NonNegReal -> NonNegReal"
    assert [p["type"] for p in payload["params"]] == ["NonNegReal", "NonNegReal"]
    parse_program(payload["scaffold"])


def test_abstract_then_check_round_trip(tmp_path, capsys):
    code, out, _ = run(
        capsys, "abstract", str(CORPUS_DIR / "area-samples.rkt"),
        "--name", "rect-area", "--params", "length,width",
    )
    assert code == 0
    completed = out + "\n(check-expect (rect-area 2 7) 14)\n"
    target = tmp_path / "completed.rkt"
    target.write_text(completed, encoding="utf-8")
    code, out, _ = run(capsys, "check", str(target), "--function", "rect-area")
    assert code == 0
    assert "overall: pass" in out


def test_abstract_identical_samples_fails(tmp_path, capsys):
    f = tmp_path / "same.rkt"
    f.write_text("(define A (* 2 3))\n(define B (* 2 3))\n", encoding="utf-8")
    code, _, err = run(capsys, "abstract", str(f), "--name", "f")
    assert code == 1
    assert "define a constant" in err


def test_check_pass_and_fail_exit_codes(capsys):
    code, out, _ = run(
        capsys, "check", str(CORPUS_DIR / "rect-area.rkt"), "--function", "rect-area"
    )
    assert code == 0 and "overall: pass" in out
    code, out, _ = run(
        capsys, "check", str(CORPUS_DIR / "move-rocket-missing-left.rkt"),
        "--function", "move-rocket",
    )
    assert code == 1 and "overall: fail" in out


def test_check_json_report(capsys):
    code, out, _ = run(
        capsys, "check", str(CORPUS_DIR / "rect-area.rkt"),
        "--function", "rect-area", "--json",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["overall"] == "pass"
    assert [s["step"] for s in payload["steps"]] == list(range(1, 10))


def test_check_unknown_function_exits_2(capsys):
    code, _, err = run(
        capsys, "check", str(CORPUS_DIR / "rect-area.rkt"), "--function", "nope"
    )
    assert code == 2 and "nope is not defined" in err


def test_usage_error_exits_2(capsys):
    assert main(["frobnicate"]) == 2
    assert main([]) == 2
    assert main(["check", str(CORPUS_DIR / "rect-area.rkt")]) == 2  # missing --function


def test_atomic_flag_extends_default_forms(tmp_path, capsys):
    f = tmp_path / "samples.rkt"
    f.write_text(
        "(define A (posn-x (make-posn 1 2)))\n"
        "(define B (posn-x (make-posn 3 4)))\n",
        encoding="utf-8",
    )
    code, out, _ = run(capsys, "abstract", str(f), "--name", "f", "--json")
    assert code == 0
    assert [p["type"] for p in json.loads(out)["params"]] == ["Posn"]

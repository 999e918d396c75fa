"""Command-line entry points: parse, test, abstract, check, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .abstraction import (
    DEFAULT_ATOMIC_FORMS,
    NoDifferenceError,
    ShapeError,
    generate_scaffold,
    synthesize,
)
from .evaluator import (
    EvalError,
    Evaluator,
    run_program,
    run_report_json,
    run_report_text,
)
from .recipe import CheckConfig, UnknownFunction, check_recipe, report_to_json, report_to_text
from .rng import Rng
from .semtypes import render_signature, render_type
from .sexpr import (
    ConstantDef,
    FunctionDef,
    ParseError,
    Program,
    TestDef,
    VarRef,
    parse_program,
    print_program,
    walk,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recipekit",
        description="Design-recipe tools for the teaching-language subset.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a source file and reprint it")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("test", help="run checks and report coverage")
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("abstract", help="synthesize a function from sample constants")
    p.add_argument("file")
    p.add_argument("--name", required=True, help="name for the new function")
    p.add_argument("--params", help="comma-separated parameter names")
    p.add_argument("--atomic", help="comma-separated extra atomic forms")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("check", help="audit a function against the nine steps")
    p.add_argument("file")
    p.add_argument("--function", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--atomic", help="comma-separated extra atomic forms")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("serve", help="host the rocket game over HTTP")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--config", help="path to a game-config JSON file")

    return parser


def _atomic_forms(raw: Optional[str]) -> frozenset[str]:
    if not raw:
        return DEFAULT_ATOMIC_FORMS
    extra = {name.strip() for name in raw.split(",") if name.strip()}
    return DEFAULT_ATOMIC_FORMS | frozenset(extra)


def _load(path: str) -> Program:
    return parse_program(Path(path).read_text(encoding="utf-8"))


def _cmd_parse(args) -> int:
    program = _load(args.file)
    if args.json:
        kinds = {ConstantDef: "constant", FunctionDef: "function", TestDef: "test"}
        payload = {
            "definitions": [
                {
                    "kind": kinds[type(d)],
                    "name": getattr(d, "name", None),
                    "line": d.span.line,
                }
                for d in program.definitions
            ]
        }
        print(json.dumps(payload, indent=2))
    else:
        sys.stdout.write(print_program(program))
    return EXIT_OK


def _cmd_test(args) -> int:
    program = _load(args.file)
    try:
        tests, coverage = run_program(program, args.seed)
    except EvalError as err:
        print(f"{args.file}:{err.span.line}:{err.span.column}: {err.message}",
              file=sys.stderr)
        return EXIT_FAILURE
    if args.json:
        print(json.dumps(run_report_json(tests, coverage, program.source), indent=2))
    else:
        print(run_report_text(tests, coverage, program.source))
    ok = tests.all_passed() and coverage.fully_covered()
    return EXIT_OK if ok else EXIT_FAILURE


def _sample_constants(program: Program) -> list[ConstantDef]:
    referenced = set()
    for d in program.definitions:
        if isinstance(d, (ConstantDef, FunctionDef)):
            referenced.update(
                n.name for n in walk(d.body) if isinstance(n, VarRef)
            )
    return [
        d for d in program.definitions
        if isinstance(d, ConstantDef) and d.name not in referenced
    ]


def _cmd_abstract(args) -> int:
    program = _load(args.file)
    samples = _sample_constants(program)
    if len(samples) < 2:
        print("abstract needs at least 2 sample constants", file=sys.stderr)
        return EXIT_FAILURE
    evaluator = Evaluator(program)
    try:
        evaluator.eval_constants(Rng(0))
        sf = synthesize(
            [(c.name, c.body) for c in samples],
            args.name,
            lambda e: evaluator.evaluate(e, {}, Rng(0))[0],
            param_names=args.params.split(",") if args.params else None,
            atomic_forms=_atomic_forms(args.atomic),
        )
    except (EvalError, ShapeError, NoDifferenceError, ValueError) as err:
        print(str(err), file=sys.stderr)
        return EXIT_FAILURE
    scaffold = generate_scaffold(sf)
    if args.json:
        payload = {
            "scaffold": scaffold,
            "signature": render_signature(sf.signature),
            "params": [
                {"name": name, "type": render_type(t)} for name, t in sf.params
            ],
            "warnings": list(sf.warnings),
        }
        print(json.dumps(payload, indent=2))
    else:
        for warning in sf.warnings:
            print(f"; note: {warning}", file=sys.stderr)
        sys.stdout.write(scaffold)
    return EXIT_OK


def _cmd_check(args) -> int:
    program = _load(args.file)
    config = CheckConfig(atomic_forms=_atomic_forms(args.atomic), seed=args.seed)
    try:
        report = check_recipe(program, args.function, config)
    except UnknownFunction as err:
        print(str(err), file=sys.stderr)
        return EXIT_USAGE
    if args.json:
        print(json.dumps(report_to_json(report), indent=2))
    else:
        print(report_to_text(report))
    return EXIT_OK if report.overall == "pass" else EXIT_FAILURE


def _cmd_serve(args) -> int:
    import uvicorn

    from .game import GameConfig, config_from_json
    from .service import create_app

    cfg = GameConfig()
    if args.config:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        cfg = config_from_json(raw)
    uvicorn.run(create_app(cfg), host=args.host, port=args.port)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    handlers = {
        "parse": _cmd_parse,
        "test": _cmd_test,
        "abstract": _cmd_abstract,
        "check": _cmd_check,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except ParseError as err:
        target = getattr(args, "file", "<input>")
        print(f"{target}:{err.span.line}:{err.span.column}: {err.message}",
              file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as err:
        print(str(err), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

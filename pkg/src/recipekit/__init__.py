"""Design-recipe tooling: parse, evaluate, synthesize, audit, and play."""

from .abstraction import (
    Generalization,
    NoDifferenceError,
    ShapeError,
    SynthesizedFunction,
    generalize,
    generate_scaffold,
    infer_signature,
    synthesize,
)
from .evaluator import (
    CoverageReport,
    EvalError,
    Evaluator,
    TestReport,
    evaluate,
    run_program,
)
from .recipe import CheckConfig, RecipeReport, UnknownFunction, check_recipe
from .rng import Rng
from .semtypes import Signature, infer_type, parse_signature_comment
from .sexpr import ParseError, Program, parse_program, print_program
from .values import Value

__all__ = [
    "CheckConfig",
    "CoverageReport",
    "EvalError",
    "Evaluator",
    "Generalization",
    "NoDifferenceError",
    "ParseError",
    "Program",
    "RecipeReport",
    "Rng",
    "ShapeError",
    "Signature",
    "SynthesizedFunction",
    "TestReport",
    "UnknownFunction",
    "Value",
    "check_recipe",
    "evaluate",
    "generalize",
    "generate_scaffold",
    "infer_signature",
    "infer_type",
    "parse_program",
    "parse_signature_comment",
    "print_program",
    "run_program",
    "synthesize",
]

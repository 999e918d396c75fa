from __future__ import annotations

from pathlib import Path

import pytest

from recipekit.sexpr import Program, parse_program

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"

CORPUS_FILES = sorted(p.name for p in CORPUS_DIR.glob("*.rkt"))


def corpus_text(name: str) -> str:
    return (CORPUS_DIR / name).read_text(encoding="utf-8")


def corpus_program(name: str) -> Program:
    return parse_program(corpus_text(name))


@pytest.fixture
def area_program() -> Program:
    return corpus_program("rect-area.rkt")


@pytest.fixture
def eaten_program() -> Program:
    return corpus_program("eaten.rkt")


@pytest.fixture
def mvrocket_program() -> Program:
    return corpus_program("mvrocket.rkt")

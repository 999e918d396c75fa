"""Reader and printer for the teaching-language subset.

Programs are sequences of definitions: constants, functions, and the three
check forms. Signatures and purpose statements live in `;` comments, so the
reader attaches each maximal run of comment lines to the definition that
immediately follows it (a blank line breaks the attachment).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Union


@dataclass(frozen=True)
class SourceSpan:
    """Half-open byte range plus the 1-based line/column of its start."""

    byte_start: int
    byte_end: int
    line: int
    column: int

    def __post_init__(self) -> None:
        if self.byte_start > self.byte_end:
            raise ValueError("span start after end")
        if self.line < 1 or self.column < 1:
            raise ValueError("line and column are 1-based")


NO_SPAN = SourceSpan(0, 0, 1, 1)


def span_text(source: str, span: SourceSpan) -> str:
    """Slice the text a span covers out of the original source."""
    return source.encode("utf-8")[span.byte_start:span.byte_end].decode("utf-8")


class ParseError(Exception):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.message = message
        self.span = span


# --- expressions ------------------------------------------------------------
#
# Spans and node ids never participate in equality: two parses of the same
# text compare equal even though ids and offsets differ.


@dataclass(frozen=True)
class NumberLit:
    value: Fraction
    span: SourceSpan = field(default=NO_SPAN, compare=False)
    node_id: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class StringLit:
    value: str
    span: SourceSpan = field(default=NO_SPAN, compare=False)
    node_id: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class BooleanLit:
    value: bool
    span: SourceSpan = field(default=NO_SPAN, compare=False)
    node_id: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class VarRef:
    name: str
    span: SourceSpan = field(default=NO_SPAN, compare=False)
    node_id: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class App:
    op: str
    args: tuple["Expr", ...]
    span: SourceSpan = field(default=NO_SPAN, compare=False)
    node_id: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class CondClause:
    question: "Expr"
    answer: "Expr"


@dataclass(frozen=True)
class Cond:
    clauses: tuple[CondClause, ...]
    else_answer: Optional["Expr"]
    span: SourceSpan = field(default=NO_SPAN, compare=False)
    node_id: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class AndE:
    args: tuple["Expr", ...]
    span: SourceSpan = field(default=NO_SPAN, compare=False)
    node_id: int = field(default=-1, compare=False)


@dataclass(frozen=True)
class OrE:
    args: tuple["Expr", ...]
    span: SourceSpan = field(default=NO_SPAN, compare=False)
    node_id: int = field(default=-1, compare=False)


Expr = Union[NumberLit, StringLit, BooleanLit, VarRef, App, Cond, AndE, OrE]

SPECIAL_FORMS = frozenset(
    {"define", "cond", "else", "and", "or",
     "check-expect", "check-within", "check-random"}
)


def children(e: Expr) -> tuple[Expr, ...]:
    """Immediate subexpressions in evaluation-source order."""
    if isinstance(e, (App, AndE, OrE)):
        return e.args
    if isinstance(e, Cond):
        out: list[Expr] = []
        for c in e.clauses:
            out.append(c.question)
            out.append(c.answer)
        if e.else_answer is not None:
            out.append(e.else_answer)
        return tuple(out)
    return ()


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal of an expression tree."""
    yield e
    for c in children(e):
        yield from walk(c)


def replace_children(e: Expr, new: list["Expr"]) -> Expr:
    """Rebuild a node with the given children (same arity as children(e))."""
    if isinstance(e, App):
        return App(e.op, tuple(new), e.span, e.node_id)
    if isinstance(e, AndE):
        return AndE(tuple(new), e.span, e.node_id)
    if isinstance(e, OrE):
        return OrE(tuple(new), e.span, e.node_id)
    if isinstance(e, Cond):
        k = len(e.clauses)
        clauses = tuple(CondClause(new[2 * i], new[2 * i + 1]) for i in range(k))
        else_answer = new[2 * k] if e.else_answer is not None else None
        return Cond(clauses, else_answer, e.span, e.node_id)
    if new:
        raise ValueError(f"{type(e).__name__} has no children")
    return e


# --- definitions ------------------------------------------------------------


@dataclass(frozen=True)
class CommentBlock:
    lines: tuple[str, ...]
    span: SourceSpan = field(default=NO_SPAN, compare=False)


EMPTY_COMMENTS = CommentBlock(())


@dataclass(frozen=True)
class ConstantDef:
    name: str
    body: Expr
    comments: CommentBlock = field(default=EMPTY_COMMENTS, compare=False)
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class FunctionDef:
    name: str
    params: tuple[str, ...]
    body: Expr
    comments: CommentBlock = field(default=EMPTY_COMMENTS, compare=False)
    span: SourceSpan = field(default=NO_SPAN, compare=False)


@dataclass(frozen=True)
class TestDef:
    __test__ = False  # keep pytest collection away

    kind: str  # "expect" | "within" | "random"
    actual: Expr
    expected: Expr
    tolerance: Optional[Expr]
    comments: CommentBlock = field(default=EMPTY_COMMENTS, compare=False)
    span: SourceSpan = field(default=NO_SPAN, compare=False)

    def __post_init__(self) -> None:
        if (self.kind == "within") != (self.tolerance is not None):
            raise ValueError("only check-within carries a tolerance")


Definition = Union[ConstantDef, FunctionDef, TestDef]


@dataclass(frozen=True)
class Program:
    definitions: tuple[Definition, ...]
    source: str = field(default="", compare=False)
    # Unattached comment blocks, keyed by the index of the definition they
    # precede (len(definitions) marks trailing comments). Kept so printing
    # loses nothing, but never part of structural equality.
    floating_comments: tuple[tuple[int, CommentBlock], ...] = field(
        default=(), compare=False
    )

    def functions(self) -> dict[str, FunctionDef]:
        return {d.name: d for d in self.definitions if isinstance(d, FunctionDef)}

    def constants(self) -> dict[str, ConstantDef]:
        return {d.name: d for d in self.definitions if isinstance(d, ConstantDef)}

    def tests(self) -> list[TestDef]:
        return [d for d in self.definitions if isinstance(d, TestDef)]


# --- lexer ------------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # "open" | "close" | "atom" | "string" | "comment"
    text: str
    span: SourceSpan
    cp_start: int
    cp_end: int
    at_line_start: bool  # only whitespace precedes it on its line


_DELIMS = {"(": "open", "[": "open", ")": "close", "]": "close"}
_STRING_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


class _Lexer:
    def __init__(self, source: str):
        self.source = source
        self.i = 0
        self.line = 1
        self.col = 1
        self.line_blank_so_far = True
        # byte offset of each codepoint, so spans can be byte-addressed
        self.byte_at = [0] * (len(source) + 1)
        total = 0
        for idx, ch in enumerate(source):
            self.byte_at[idx] = total
            total += len(ch.encode("utf-8"))
        self.byte_at[len(source)] = total

    def _advance(self) -> str:
        ch = self.source[self.i]
        self.i += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
            self.line_blank_so_far = True
        else:
            self.col += 1
            if ch not in " \t\r":
                self.line_blank_so_far = False
        return ch

    def _token(self, kind, text, start, line, col, fresh) -> _Token:
        span = SourceSpan(self.byte_at[start], self.byte_at[self.i], line, col)
        return _Token(kind, text, span, start, self.i, fresh)

    def tokens(self) -> list[_Token]:
        out = []
        src = self.source
        while self.i < len(src):
            start, line, col = self.i, self.line, self.col
            fresh = self.line_blank_so_far
            ch = src[self.i]
            if ch in " \t\r\n":
                self._advance()
            elif ch in _DELIMS:
                self._advance()
                out.append(self._token(_DELIMS[ch], ch, start, line, col, fresh))
            elif ch == ";":
                while self.i < len(src) and src[self.i] != "\n":
                    self._advance()
                text = src[start:self.i]
                out.append(self._token("comment", text, start, line, col, fresh))
            elif ch == '"':
                out.append(self._string(start, line, col, fresh))
            else:
                while self.i < len(src) and src[self.i] not in ' \t\r\n()[];"':
                    self._advance()
                text = src[start:self.i]
                out.append(self._token("atom", text, start, line, col, fresh))
        return out

    def _string(self, start: int, line: int, col: int, fresh: bool) -> _Token:
        self._advance()  # opening quote
        chars = []
        while True:
            if self.i >= len(self.source) or self.source[self.i] == "\n":
                span = SourceSpan(self.byte_at[start], self.byte_at[self.i], line, col)
                raise ParseError("unterminated string literal", span)
            ch = self._advance()
            if ch == '"':
                break
            if ch == "\\":
                if self.i >= len(self.source):
                    span = SourceSpan(
                        self.byte_at[start], self.byte_at[self.i], line, col
                    )
                    raise ParseError("unterminated string literal", span)
                esc = self._advance()
                if esc not in _STRING_ESCAPES:
                    span = SourceSpan(
                        self.byte_at[start], self.byte_at[self.i], line, col
                    )
                    raise ParseError(f"unknown string escape \\{esc}", span)
                chars.append(_STRING_ESCAPES[esc])
            else:
                chars.append(ch)
        return self._token("string", "".join(chars), start, line, col, fresh)


# --- parser -----------------------------------------------------------------

_BOOLEANS = {"#true": True, "#t": True, "#false": False, "#f": False}


def parse_number(text: str) -> Optional[Fraction]:
    """Exact rational for an integer, fraction, or finite decimal; else None."""
    body = text[1:] if text[:1] in "+-" else text
    if not body:
        return None
    sign = -1 if text[:1] == "-" else 1
    if body.isdigit():
        return Fraction(sign * int(body))
    if "/" in body:
        num, _, den = body.partition("/")
        if num.isdigit() and den.isdigit() and int(den) != 0:
            return Fraction(sign * int(num), int(den))
        return None
    if "." in body:
        whole, _, frac = body.partition(".")
        if (whole or frac) and (whole == "" or whole.isdigit()) and (frac == "" or frac.isdigit()):
            digits = (whole or "0") + (frac or "")
            return Fraction(sign * int(digits), 10 ** len(frac))
    return None


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _Lexer(source).tokens()
        self.pos = 0
        self.next_id = 0

    # -- token plumbing

    def _peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _next(self) -> _Token:
        tok = self._peek()
        if tok is None:
            last = self.tokens[-1].span if self.tokens else NO_SPAN
            raise ParseError("unexpected end of input", last)
        self.pos += 1
        return tok

    def _fresh_id(self) -> int:
        self.next_id += 1
        return self.next_id - 1

    # -- s-expression layer: nested lists of tokens

    def _read_form(self, tok: _Token):
        """Return a token, or (open_tok, [forms...], close_tok) for a list."""
        if tok.kind == "close":
            raise ParseError(f"unmatched '{tok.text}'", tok.span)
        if tok.kind != "open":
            return tok
        items = []
        while True:
            nxt = self._peek()
            if nxt is None:
                raise ParseError("unclosed parenthesis", tok.span)
            if nxt.kind == "comment":
                self.pos += 1  # comments inside forms are dropped
                continue
            if nxt.kind == "close":
                self.pos += 1
                if {"(": ")", "[": "]"}[tok.text] != nxt.text:
                    raise ParseError(
                        f"mismatched '{tok.text}' closed by '{nxt.text}'", nxt.span
                    )
                return (tok, items, nxt)
            items.append(self._read_form(self._next()))
        # not reached

    @staticmethod
    def _form_span(form) -> SourceSpan:
        if isinstance(form, tuple):
            open_tok, _, close_tok = form
            return SourceSpan(
                open_tok.span.byte_start,
                close_tok.span.byte_end,
                open_tok.span.line,
                open_tok.span.column,
            )
        return form.span

    # -- expression layer

    def _head_name(self, form) -> Optional[str]:
        if isinstance(form, tuple) and form[1]:
            head = form[1][0]
            if isinstance(head, _Token) and head.kind == "atom":
                return head.text
        return None

    def expr(self, form) -> Expr:
        span = self._form_span(form)
        if isinstance(form, _Token):
            return self._atom(form)
        _, items, _ = form
        if not items:
            raise ParseError("empty application", span)
        head = items[0]
        if isinstance(head, tuple):
            raise ParseError("operator must be a name", self._form_span(head))
        if head.kind == "string":
            raise ParseError("operator must be a name", head.span)
        name = head.text
        if name == "cond":
            return self._cond(items, span)
        if name in ("and", "or"):
            args = tuple(self.expr(f) for f in items[1:])
            if len(args) < 2:
                raise ParseError(f"{name} expects at least 2 expressions", span)
            cls = AndE if name == "and" else OrE
            return cls(args, span, self._fresh_id())
        if name in ("define", "check-expect", "check-within", "check-random", "else"):
            raise ParseError(f"{name} is not allowed inside an expression", span)
        if parse_number(name) is not None:
            raise ParseError("operator must be a name", head.span)
        args = tuple(self.expr(f) for f in items[1:])
        return App(name, args, span, self._fresh_id())

    def _atom(self, tok: _Token) -> Expr:
        if tok.kind == "string":
            return StringLit(tok.text, tok.span, self._fresh_id())
        text = tok.text
        if text.startswith("'"):
            raise ParseError("quoting is not supported", tok.span)
        if text in _BOOLEANS:
            return BooleanLit(_BOOLEANS[text], tok.span, self._fresh_id())
        if text.startswith("#"):
            raise ParseError(f"bad literal {text}", tok.span)
        num = parse_number(text)
        if num is not None:
            return NumberLit(num, tok.span, self._fresh_id())
        if text[:1] in "+-0123456789" and any(c in text for c in "0123456789") and all(
            c in "+-./0123456789" for c in text
        ) and text not in ("+", "-", "/", "..."):
            raise ParseError(f"bad number literal {text}", tok.span)
        if text in SPECIAL_FORMS:
            raise ParseError(f"{text} is not a value", tok.span)
        return VarRef(text, tok.span, self._fresh_id())

    def _cond(self, items, span: SourceSpan) -> Cond:
        clauses: list[CondClause] = []
        else_answer: Optional[Expr] = None
        body = items[1:]
        if not body:
            raise ParseError("cond requires at least one clause", span)
        for idx, form in enumerate(body):
            if not isinstance(form, tuple):
                raise ParseError("cond clause must be [question answer]", form.span)
            cspan = self._form_span(form)
            _, parts, _ = form
            if len(parts) != 2:
                raise ParseError("cond clause must be [question answer]", cspan)
            q, a = parts
            if self._is_else(q):
                if idx != len(body) - 1:
                    raise ParseError("else must be the last cond clause", cspan)
                else_answer = self.expr(a)
            else:
                clauses.append(CondClause(self.expr(q), self.expr(a)))
        if not clauses:
            # an else-only cond never decides anything
            raise ParseError("cond requires at least one clause", span)
        return Cond(tuple(clauses), else_answer, span, self._fresh_id())

    @staticmethod
    def _is_else(form) -> bool:
        return isinstance(form, _Token) and form.kind == "atom" and form.text == "else"

    # -- definition layer

    def definition(self, form, comments: CommentBlock) -> Definition:
        span = self._form_span(form)
        name = self._head_name(form)
        _, items, _ = form
        if name == "define":
            return self._define(items, span, comments)
        kind = {"check-expect": "expect", "check-within": "within",
                "check-random": "random"}[name or ""]
        want = 3 if kind == "within" else 2
        if len(items) - 1 != want:
            raise ParseError(
                f"check-{kind} expects {want} expressions", span
            )
        actual = self.expr(items[1])
        expected = self.expr(items[2])
        tolerance = self.expr(items[3]) if kind == "within" else None
        return TestDef(kind, actual, expected, tolerance, comments, span)

    def _define(self, items, span: SourceSpan, comments: CommentBlock) -> Definition:
        if len(items) != 3:
            raise ParseError("define expects a name and one expression", span)
        target = items[1]
        if isinstance(target, _Token):
            if target.kind != "atom" or parse_number(target.text) is not None:
                raise ParseError("define expects a name", target.span)
            if target.text in SPECIAL_FORMS:
                raise ParseError(f"cannot redefine {target.text}", target.span)
            return ConstantDef(target.text, self.expr(items[2]), comments, span)
        _, header, _ = target
        hspan = self._form_span(target)
        if not header:
            raise ParseError("function header needs a name", hspan)
        names = []
        for tok in header:
            if not isinstance(tok, _Token) or tok.kind != "atom" or \
                    parse_number(tok.text) is not None or tok.text in SPECIAL_FORMS:
                raise ParseError(
                    "function header must list plain names",
                    self._form_span(tok),
                )
            names.append(tok.text)
        fn_name, params = names[0], names[1:]
        if not params:
            raise ParseError("a function needs at least one parameter", hspan)
        seen = set()
        for p in params:
            if p in seen:
                raise ParseError(f"duplicate parameter name {p}", hspan)
            seen.add(p)
        return FunctionDef(fn_name, tuple(params), self.expr(items[2]), comments, span)

    # -- program layer

    def program(self) -> Program:
        definitions: list[Definition] = []
        floating: list[tuple[int, CommentBlock]] = []
        pending: list[_Token] = []

        def flush_floating() -> None:
            if pending:
                floating.append((len(definitions), self._block(pending)))
                pending.clear()

        while True:
            tok = self._peek()
            if tok is None:
                break
            if tok.kind == "comment":
                self.pos += 1
                # trailing comments and runs broken by a blank line float free
                if not tok.at_line_start:
                    flush_floating()
                    floating.append((len(definitions), self._block([tok])))
                    continue
                if pending and not self._adjacent(pending[-1], tok):
                    flush_floating()
                pending.append(tok)
                continue
            if tok.kind == "close":
                raise ParseError(f"unmatched '{tok.text}'", tok.span)
            if tok.kind != "open":
                raise ParseError("expected a definition", tok.span)
            form = self._read_form(self._next())
            head = self._head_name(form)
            if head not in ("define", "check-expect", "check-within", "check-random"):
                raise ParseError(
                    "only definitions and checks are allowed at the top level",
                    self._form_span(form),
                )
            comments = EMPTY_COMMENTS
            if pending:
                if self._adjacent(pending[-1], tok):
                    comments = self._block(pending)
                    pending.clear()
                else:
                    flush_floating()
            definitions.append(self.definition(form, comments))
        flush_floating()
        self._check_names(definitions)
        return Program(tuple(definitions), self.source, tuple(floating))

    def _adjacent(self, prev: _Token, tok: _Token) -> bool:
        """True when no blank line separates prev's end from tok's start."""
        between = self.source[prev.cp_end:tok.cp_start]
        return between.count("\n") <= 1

    def _block(self, toks: list[_Token]) -> CommentBlock:
        span = SourceSpan(
            toks[0].span.byte_start,
            toks[-1].span.byte_end,
            toks[0].span.line,
            toks[0].span.column,
        )
        return CommentBlock(tuple(t.text for t in toks), span)

    @staticmethod
    def _check_names(definitions: list[Definition]) -> None:
        seen: dict[str, Definition] = {}
        for d in definitions:
            if isinstance(d, (ConstantDef, FunctionDef)):
                if d.name in seen:
                    raise ParseError(f"{d.name} is defined twice", d.span)
                seen[d.name] = d


def parse_program(source: str) -> Program:
    """Parse source text into a Program; raises ParseError with a span."""
    return _Parser(source).program()


def parse_expr(source: str) -> Expr:
    """Parse a single expression (a convenience for tests and tools)."""
    parser = _Parser(source)
    tok = parser._peek()
    if tok is None:
        raise ParseError("expected an expression", NO_SPAN)
    expr = parser.expr(parser._read_form(parser._next()))
    if parser._peek() is not None:
        raise ParseError("trailing input after expression", parser._peek().span)
    return expr


# --- printer ----------------------------------------------------------------


def _print_string(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"')
    out = out.replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


def print_number(n: Fraction) -> str:
    return str(n.numerator) if n.denominator == 1 else f"{n.numerator}/{n.denominator}"


def print_expr(e: Expr, indent: int = 0) -> str:
    """Deterministic rendering; re-parsing yields a structurally equal tree."""
    if isinstance(e, NumberLit):
        return print_number(e.value)
    if isinstance(e, StringLit):
        return _print_string(e.value)
    if isinstance(e, BooleanLit):
        return "#true" if e.value else "#false"
    if isinstance(e, VarRef):
        return e.name
    if isinstance(e, App):
        if not e.args:
            return f"({e.op})"
        args = " ".join(print_expr(a, indent) for a in e.args)
        return f"({e.op} {args})"
    if isinstance(e, (AndE, OrE)):
        op = "and" if isinstance(e, AndE) else "or"
        args = " ".join(print_expr(a, indent) for a in e.args)
        return f"({op} {args})"
    if isinstance(e, Cond):
        pad = " " * (indent + 6)
        parts = [
            f"[{print_expr(c.question, indent + 6)} {print_expr(c.answer, indent + 6)}]"
            for c in e.clauses
        ]
        if e.else_answer is not None:
            parts.append(f"[else {print_expr(e.else_answer, indent + 6)}]")
        joined = ("\n" + pad).join(parts)
        return f"(cond {joined})"
    raise TypeError(f"not an expression: {e!r}")


def print_definition(d: Definition) -> str:
    lines = list(d.comments.lines)
    if isinstance(d, ConstantDef):
        lines.append(f"(define {d.name} {print_expr(d.body)})")
    elif isinstance(d, FunctionDef):
        header = " ".join((d.name,) + d.params)
        lines.append(f"(define ({header})")
        lines.append(f"  {print_expr(d.body, 2)})")
    else:
        form = {"expect": "check-expect", "within": "check-within",
                "random": "check-random"}[d.kind]
        parts = [print_expr(d.actual), print_expr(d.expected)]
        if d.tolerance is not None:
            parts.append(print_expr(d.tolerance))
        lines.append(f"({form} {' '.join(parts)})")
    return "\n".join(lines)


def print_program(p: Program) -> str:
    """Render a whole program, comments included, one blank line between items."""
    floating = dict()
    for idx, block in p.floating_comments:
        floating.setdefault(idx, []).append(block)
    chunks: list[str] = []
    for i, d in enumerate(p.definitions):
        for block in floating.get(i, ()):
            chunks.append("\n".join(block.lines))
        chunks.append(print_definition(d))
    for block in floating.get(len(p.definitions), ()):
        chunks.append("\n".join(block.lines))
    return "\n\n".join(chunks) + ("\n" if chunks else "")

"""Semantic types for signatures, inferred from concrete values.

The lattice is deliberately coarse: the only numeric refinement is
non-negativity, and strings refine to finite literal sets (the shape of a
direction argument). Everything else joins to Any.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .values import BoolV, ImageV, NumV, PosnV, StrV, Value

ENUM_WIDEN_LIMIT = 8  # StringEnum wider than this renders unreadably


@dataclass(frozen=True)
class Boolean:
    pass


@dataclass(frozen=True)
class StringAny:
    pass


@dataclass(frozen=True)
class StringEnum:
    literals: frozenset[str]


@dataclass(frozen=True)
class NonNegReal:
    pass


@dataclass(frozen=True)
class Real:
    pass


@dataclass(frozen=True)
class PosnT:
    pass


@dataclass(frozen=True)
class ImageT:
    pass


@dataclass(frozen=True)
class AliasT:
    name: str


@dataclass(frozen=True)
class AnyT:
    pass


@dataclass(frozen=True)
class NeverT:
    pass


SemType = Union[
    Boolean, StringAny, StringEnum, NonNegReal, Real, PosnT, ImageT,
    AliasT, AnyT, NeverT,
]

BOOLEAN = Boolean()
STRING = StringAny()
NON_NEG_REAL = NonNegReal()
REAL = Real()
POSN = PosnT()
IMAGE = ImageT()
ANY = AnyT()
NEVER = NeverT()


def join(a: SemType, b: SemType, enum_limit: int = ENUM_WIDEN_LIMIT) -> SemType:
    """Least upper bound of two semantic types."""
    if a == b:
        return a
    if isinstance(a, NeverT):
        return b
    if isinstance(b, NeverT):
        return a
    if isinstance(a, AnyT) or isinstance(b, AnyT):
        return ANY
    if isinstance(a, (NonNegReal, Real)) and isinstance(b, (NonNegReal, Real)):
        return REAL
    if isinstance(a, StringEnum) and isinstance(b, StringEnum):
        merged = a.literals | b.literals
        return STRING if len(merged) > enum_limit else StringEnum(merged)
    if isinstance(a, (StringEnum, StringAny)) and isinstance(b, (StringEnum, StringAny)):
        return STRING
    return ANY


def is_subtype(a: SemType, b: SemType) -> bool:
    if a == b or isinstance(a, NeverT) or isinstance(b, AnyT):
        return True
    if isinstance(a, NonNegReal) and isinstance(b, Real):
        return True
    if isinstance(a, StringEnum):
        if isinstance(b, StringEnum):
            return a.literals <= b.literals
        return isinstance(b, StringAny)
    return False


def type_of_value(v: Value) -> SemType:
    if isinstance(v, NumV):
        return NON_NEG_REAL if v.value >= 0 else REAL
    if isinstance(v, StrV):
        return StringEnum(frozenset({v.value}))
    if isinstance(v, BoolV):
        return BOOLEAN
    if isinstance(v, PosnV):
        return POSN
    if isinstance(v, ImageV):
        return IMAGE
    raise TypeError(f"not a value: {v!r}")


def infer_type(values: Sequence[Value], enum_limit: int = ENUM_WIDEN_LIMIT) -> SemType:
    """Join of the per-value atomic types; order never matters."""
    if not values:
        raise ValueError("cannot infer a type from no values")
    out: SemType = NEVER
    for v in values:
        out = join(out, type_of_value(v), enum_limit)
    return out


# --- signatures -------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    param_types: tuple[SemType, ...]
    return_type: SemType

    @property
    def arity(self) -> int:
        return len(self.param_types)


def signature_from_values(hole_values: Sequence[Sequence[Value]],
                          return_values: Sequence[Value],
                          enum_limit: int = ENUM_WIDEN_LIMIT) -> Signature:
    """Signature from each hole's evaluated values plus the samples' values."""
    params = tuple(infer_type(vec, enum_limit) for vec in hole_values)
    return Signature(params, infer_type(return_values, enum_limit))


_KEYWORD_TYPES = {
    "boolean": BOOLEAN,
    "string": STRING,
    "real": REAL,
    "number": REAL,
    "nonnegreal": NON_NEG_REAL,
    "posn": POSN,
    "image": IMAGE,
    "scene": IMAGE,
    "any": ANY,
    "never": NEVER,
    "ℝ": REAL,
    "ℝ≥0": NON_NEG_REAL,
    "ℝ>=0": NON_NEG_REAL,
}

_ARROWS = ("--->", "-->", "->", "→")


def render_type(t: SemType) -> str:
    if isinstance(t, Boolean):
        return "Boolean"
    if isinstance(t, StringAny):
        return "String"
    if isinstance(t, StringEnum):
        body = "|".join(f'"{s}"' for s in sorted(t.literals))
        return f"({body})"
    if isinstance(t, NonNegReal):
        return "NonNegReal"
    if isinstance(t, Real):
        return "Real"
    if isinstance(t, PosnT):
        return "Posn"
    if isinstance(t, ImageT):
        return "Image"
    if isinstance(t, AliasT):
        return t.name
    if isinstance(t, AnyT):
        return "Any"
    if isinstance(t, NeverT):
        return "Never"
    raise TypeError(f"not a semantic type: {t!r}")


def _parse_type(token: str, alias_map: Optional[dict[str, SemType]]) -> Optional[SemType]:
    lowered = token.lower()
    if lowered in _KEYWORD_TYPES:
        return _KEYWORD_TYPES[lowered]
    if token in _KEYWORD_TYPES:
        return _KEYWORD_TYPES[token]
    if token.startswith("(") and token.endswith(")") and '"' in token:
        inner = token[1:-1]
        parts = inner.split("|")
        lits = []
        for p in parts:
            if len(p) < 2 or not (p.startswith('"') and p.endswith('"')):
                return None
            lits.append(p[1:-1])
        return StringEnum(frozenset(lits))
    if not token or any(c in token for c in ':;,."()[]{}'):
        return None
    if alias_map and token in alias_map:
        return alias_map[token]
    return AliasT(token)


def render_signature(sig: Signature,
                     alias_map: Optional[dict[str, SemType]] = None,
                     arrow: str = "->") -> str:
    """Comment-line text for a signature, e.g. "NonNegReal NonNegReal -> NonNegReal".

    When an alias map is given, parameter positions consume matching aliases
    in map order (each at most once); the return position may reuse any.
    """
    names: list[str] = []
    used: set[str] = set()
    for t in sig.param_types:
        alias = None
        if alias_map:
            for name, aliased in alias_map.items():
                if name not in used and aliased == t:
                    alias = name
                    used.add(name)
                    break
        names.append(alias or render_type(t))
    ret = render_type(sig.return_type)
    if alias_map:
        for name, aliased in alias_map.items():
            if aliased == sig.return_type:
                ret = name
                break
    return " ".join(names + [arrow, ret])


def parse_signature_line(line: str,
                         alias_map: Optional[dict[str, SemType]] = None) -> Optional[Signature]:
    body = line.lstrip()
    while body.startswith(";"):
        body = body[1:]
    tokens = body.split()
    arrow_positions = [i for i, tok in enumerate(tokens) if tok in _ARROWS]
    if len(arrow_positions) != 1:
        return None
    at = arrow_positions[0]
    if at != len(tokens) - 2:  # exactly one return-type token
        return None
    param_tokens, ret_token = tokens[:at], tokens[-1]
    params = []
    for tok in param_tokens:
        t = _parse_type(tok, alias_map)
        if t is None:
            return None
        params.append(t)
    ret = _parse_type(ret_token, alias_map)
    if ret is None:
        return None
    return Signature(tuple(params), ret)


def parse_signature_comment(block,
                            alias_map: Optional[dict[str, SemType]] = None) -> Optional[Signature]:
    """First line of a comment block that reads as a signature, if any.

    Accepts a CommentBlock or any sequence of comment lines.
    """
    lines = getattr(block, "lines", block)
    for line in lines:
        sig = parse_signature_line(line, alias_map)
        if sig is not None:
            return sig
    return None

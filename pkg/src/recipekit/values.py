"""Runtime values: exact rationals, strings, booleans, posns, and images.

Images are an abstract algebra of scene-building operations; nothing here
rasterizes. Two values are the same iff they compare equal, with rational
components compared exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .sexpr import print_number


# --- images -----------------------------------------------------------------


@dataclass(frozen=True)
class EmptyScene:
    width: Fraction
    height: Fraction


@dataclass(frozen=True)
class Rect:
    width: Fraction
    height: Fraction
    mode: str
    color: str


@dataclass(frozen=True)
class Circ:
    radius: Fraction
    mode: str
    color: str


@dataclass(frozen=True)
class Rotate:
    degrees: Fraction
    image: "ImageExpr"


@dataclass(frozen=True)
class Place:
    image: "ImageExpr"
    x: Fraction
    y: Fraction
    base: "ImageExpr"


ImageExpr = Union[EmptyScene, Rect, Circ, Rotate, Place]


def image_size(img: ImageExpr) -> tuple[Fraction, Fraction]:
    """Width and height of an image's bounding box."""
    if isinstance(img, (EmptyScene, Rect)):
        return img.width, img.height
    if isinstance(img, Circ):
        return 2 * img.radius, 2 * img.radius
    if isinstance(img, Place):
        return image_size(img.base)
    if isinstance(img, Rotate):
        w, h = image_size(img.image)
        quarter = img.degrees % 360
        if quarter % 90 == 0:
            return (h, w) if quarter in (90, 270) else (w, h)
        # non-right angles fall back to float trig; deterministic, not exact
        theta = math.radians(float(img.degrees))
        c, s = abs(math.cos(theta)), abs(math.sin(theta))
        return (
            Fraction(float(w) * c + float(h) * s),
            Fraction(float(w) * s + float(h) * c),
        )
    raise TypeError(f"not an image: {img!r}")


def image_width(img: ImageExpr) -> Fraction:
    return image_size(img)[0]


def image_height(img: ImageExpr) -> Fraction:
    return image_size(img)[1]


# --- values -----------------------------------------------------------------


@dataclass(frozen=True)
class NumV:
    value: Fraction


@dataclass(frozen=True)
class StrV:
    value: str


@dataclass(frozen=True)
class BoolV:
    value: bool


@dataclass(frozen=True)
class PosnV:
    x: NumV
    y: NumV


@dataclass(frozen=True)
class ImageV:
    image: ImageExpr


Value = Union[NumV, StrV, BoolV, PosnV, ImageV]

TRUE = BoolV(True)
FALSE = BoolV(False)


def num(n) -> NumV:
    return NumV(Fraction(n))


def posn(x, y) -> PosnV:
    return PosnV(num(x), num(y))


def render_image(img: ImageExpr) -> str:
    if isinstance(img, EmptyScene):
        return f"(empty-scene {print_number(img.width)} {print_number(img.height)})"
    if isinstance(img, Rect):
        return (
            f"(rectangle {print_number(img.width)} {print_number(img.height)}"
            f' "{img.mode}" "{img.color}")'
        )
    if isinstance(img, Circ):
        return f'(circle {print_number(img.radius)} "{img.mode}" "{img.color}")'
    if isinstance(img, Rotate):
        return f"(rotate {print_number(img.degrees)} {render_image(img.image)})"
    if isinstance(img, Place):
        return (
            f"(place-image {render_image(img.image)} {print_number(img.x)}"
            f" {print_number(img.y)} {render_image(img.base)})"
        )
    raise TypeError(f"not an image: {img!r}")


def render_value(v: Value) -> str:
    """Source-shaped rendering used in test reports."""
    if isinstance(v, NumV):
        return print_number(v.value)
    if isinstance(v, StrV):
        return '"' + v.value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, BoolV):
        return "#true" if v.value else "#false"
    if isinstance(v, PosnV):
        return f"(make-posn {render_value(v.x)} {render_value(v.y)})"
    if isinstance(v, ImageV):
        return render_image(v.image)
    raise TypeError(f"not a value: {v!r}")


# --- JSON encoding ----------------------------------------------------------


def rational_to_json(n: Fraction):
    """Integers stay integers; anything else becomes a "num/den" string."""
    n = Fraction(n)
    return int(n) if n.denominator == 1 else f"{n.numerator}/{n.denominator}"


def rational_from_json(raw) -> Fraction:
    """Inverse of rational_to_json; also tolerates decimal strings and floats."""
    if isinstance(raw, bool):
        raise ValueError("expected a rational, got a boolean")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        return Fraction(str(raw))
    if isinstance(raw, str):
        return Fraction(raw)
    raise ValueError(f"expected a rational, got {type(raw).__name__}")


def scene_to_json(img: ImageExpr) -> dict:
    """Nested scene-graph encoding mirroring the image constructors."""
    if isinstance(img, EmptyScene):
        return {
            "op": "empty",
            "width": rational_to_json(img.width),
            "height": rational_to_json(img.height),
        }
    if isinstance(img, Rect):
        return {
            "op": "rect",
            "width": rational_to_json(img.width),
            "height": rational_to_json(img.height),
            "mode": img.mode,
            "color": img.color,
        }
    if isinstance(img, Circ):
        return {
            "op": "circ",
            "radius": rational_to_json(img.radius),
            "mode": img.mode,
            "color": img.color,
        }
    if isinstance(img, Rotate):
        return {
            "op": "rotate",
            "degrees": rational_to_json(img.degrees),
            "image": scene_to_json(img.image),
        }
    if isinstance(img, Place):
        return {
            "op": "place",
            "image": scene_to_json(img.image),
            "x": rational_to_json(img.x),
            "y": rational_to_json(img.y),
            "base": scene_to_json(img.base),
        }
    raise TypeError(f"not an image: {img!r}")

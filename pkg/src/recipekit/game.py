"""The rocket game as pure transition functions over an immutable world.

A world holds the rocket posn, its travel direction, the fuel level, and
the two fuel posns. Keys only change direction; all movement, fuel drain,
consumption, and respawning happen on tick, threaded through the seeded
RNG so whole games replay exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Union

from .rng import Rng
from .values import (
    Circ,
    EmptyScene,
    ImageExpr,
    Place,
    Rect,
    Rotate,
    rational_from_json,
    rational_to_json,
)

DIRECTIONS = ("up", "down", "left", "right")


@dataclass(frozen=True)
class Posn:
    x: Fraction
    y: Fraction


def make_posn(x, y) -> Posn:
    return Posn(Fraction(x), Fraction(y))


@dataclass(frozen=True)
class GameConfig:
    width: Fraction = Fraction(500)
    height: Fraction = Fraction(500)
    delta: Fraction = Fraction(5)
    tick_dec: Fraction = Fraction(1, 10)
    good_inc: Fraction = Fraction(2)
    bad_dec: Fraction = Fraction(2)
    max_fuel: Fraction = Fraction(10)
    gfuel_img_w: Fraction = Fraction(20)
    gfuel_img_h: Fraction = Fraction(20)
    bfuel_img_w: Fraction = Fraction(20)
    bfuel_img_h: Fraction = Fraction(20)
    rocket_img_w: Fraction = Fraction(30)
    rocket_img_h: Fraction = Fraction(45)

    def __post_init__(self) -> None:
        for name in self.__dataclass_fields__:
            value = Fraction(getattr(self, name))
            object.__setattr__(self, name, value)
            if value <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("width", "height"):
            if getattr(self, name).denominator != 1:
                raise ValueError(f"{name} must be a whole number of pixels")


@dataclass(frozen=True)
class World:
    rocket: Posn
    dir: str
    flevel: Fraction
    gfuel: Posn
    bfuel: Posn

    def __post_init__(self) -> None:
        if self.dir not in DIRECTIONS:
            raise ValueError(f"dir must be one of {DIRECTIONS}")


# --- movement ---------------------------------------------------------------


def _clamp(p: Posn, cfg: GameConfig) -> Posn:
    def clip(v: Fraction, hi: Fraction) -> Fraction:
        return Fraction(0) if v < 0 else hi if v > hi else v

    return Posn(clip(p.x, cfg.width), clip(p.y, cfg.height))


def move_rocket_up(r: Posn, cfg: GameConfig) -> Posn:
    return _clamp(Posn(r.x, r.y - cfg.delta), cfg)


def move_rocket_down(r: Posn, cfg: GameConfig) -> Posn:
    return _clamp(Posn(r.x, r.y + cfg.delta), cfg)


def move_rocket_left(r: Posn, cfg: GameConfig) -> Posn:
    return _clamp(Posn(r.x - cfg.delta, r.y), cfg)


def move_rocket_right(r: Posn, cfg: GameConfig) -> Posn:
    return _clamp(Posn(r.x + cfg.delta, r.y), cfg)


def move_rocket(r: Posn, d: str, cfg: GameConfig) -> Posn:
    if d == "up":
        return move_rocket_up(r, cfg)
    if d == "down":
        return move_rocket_down(r, cfg)
    if d == "left":
        return move_rocket_left(r, cfg)
    return move_rocket_right(r, cfg)


# --- consumption ------------------------------------------------------------


def distance_on_x(a: Posn, b: Posn) -> Fraction:
    return abs(a.x - b.x)


def distance_on_y(a: Posn, b: Posn) -> Fraction:
    return abs(a.y - b.y)


def consumed(rocket: Posn, fuel: Posn, img_w: Fraction, img_h: Fraction) -> bool:
    """True when the rocket sits inside the fuel image's bounding box."""
    return distance_on_x(rocket, fuel) <= Fraction(img_w) / 2 and \
        distance_on_y(rocket, fuel) <= Fraction(img_h) / 2


# --- state transitions ------------------------------------------------------


def handle_key(w: World, key: str) -> World:
    """Arrow keys steer; anything else leaves the world untouched."""
    if key in DIRECTIONS:
        return replace(w, dir=key)
    return w


def respawn(cfg: GameConfig, rng: Rng) -> tuple[Posn, Rng]:
    """Fresh fuel posn from two draws, x first, then y."""
    rng, x = rng.next_int(int(cfg.width))
    rng, y = rng.next_int(int(cfg.height))
    return make_posn(x, y), rng


def tick(w: World, cfg: GameConfig, rng: Rng) -> tuple[World, Rng]:
    """One clock tick: move, drain, then settle good and bad fuel in order."""
    rocket = move_rocket(w.rocket, w.dir, cfg)
    flevel = max(Fraction(0), w.flevel - cfg.tick_dec)
    gfuel, bfuel = w.gfuel, w.bfuel
    if consumed(rocket, gfuel, cfg.gfuel_img_w, cfg.gfuel_img_h):
        flevel = min(cfg.max_fuel, flevel + cfg.good_inc)
        gfuel, rng = respawn(cfg, rng)
    if consumed(rocket, bfuel, cfg.bfuel_img_w, cfg.bfuel_img_h):
        flevel = max(Fraction(0), flevel - cfg.bad_dec)
        bfuel, rng = respawn(cfg, rng)
    return World(rocket, w.dir, flevel, gfuel, bfuel), rng


def game_over(w: World) -> bool:
    return w.flevel == 0


def initial_world(cfg: GameConfig, rng: Rng) -> tuple[World, Rng]:
    """Rocket centered and full of fuel; fuel posns from two respawn draws."""
    gfuel, rng = respawn(cfg, rng)
    bfuel, rng = respawn(cfg, rng)
    rocket = make_posn(cfg.width / 2, cfg.height / 2)
    return World(rocket, "up", cfg.max_fuel, gfuel, bfuel), rng


# --- drawing ----------------------------------------------------------------

_FUEL_BAR_SCALE = 10  # pixels of bar width per fuel unit
_FUEL_BAR_HEIGHT = Fraction(35)
_FUEL_BAR_OFFSET_X = Fraction(100)  # bar center sits at (width - 100, 50)
_FUEL_BAR_Y = Fraction(50)

_ROTATION_OF_DIR = {"up": 0, "left": 90, "down": 180, "right": 270}


def rocket_image(d: str, cfg: GameConfig) -> ImageExpr:
    img: ImageExpr = Rect(cfg.rocket_img_w, cfg.rocket_img_h, "solid", "gray")
    degrees = _ROTATION_OF_DIR[d]
    return img if degrees == 0 else Rotate(Fraction(degrees), img)


def draw_world(w: World, cfg: GameConfig) -> ImageExpr:
    """Scene composition, innermost first: rocket, fuel bar, good fuel, bad fuel."""
    scene: ImageExpr = EmptyScene(cfg.width, cfg.height)
    scene = Place(rocket_image(w.dir, cfg), w.rocket.x, w.rocket.y, scene)
    bar = Rect(w.flevel * _FUEL_BAR_SCALE, _FUEL_BAR_HEIGHT, "solid", "purple")
    scene = Place(bar, cfg.width - _FUEL_BAR_OFFSET_X, _FUEL_BAR_Y, scene)
    gfuel_img = Rect(cfg.gfuel_img_w, cfg.gfuel_img_h, "solid", "green")
    scene = Place(gfuel_img, w.gfuel.x, w.gfuel.y, scene)
    bfuel_img = Circ(cfg.bfuel_img_w / 2, "solid", "red")
    scene = Place(bfuel_img, w.bfuel.x, w.bfuel.y, scene)
    return scene


# --- wire formats -----------------------------------------------------------


def posn_to_json(p: Posn) -> dict:
    return {"x": rational_to_json(p.x), "y": rational_to_json(p.y)}


def world_to_json(w: World) -> dict:
    return {
        "rocket": posn_to_json(w.rocket),
        "dir": w.dir,
        "flevel": rational_to_json(w.flevel),
        "gfuel": posn_to_json(w.gfuel),
        "bfuel": posn_to_json(w.bfuel),
        "over": game_over(w),
    }


def config_from_json(raw: Union[dict, None],
                     base: GameConfig = GameConfig()) -> GameConfig:
    """Config with overrides applied; accepts snake_case or hyphenated keys."""
    if not raw:
        return base
    overrides = {}
    fields = set(GameConfig.__dataclass_fields__)
    for key, value in raw.items():
        name = key.replace("-", "_")
        if name not in fields:
            raise ValueError(f"unknown config field: {key}")
        overrides[name] = rational_from_json(value)
    return replace(base, **overrides)


def config_to_json(cfg: GameConfig) -> dict:
    return {
        name: rational_to_json(getattr(cfg, name))
        for name in cfg.__dataclass_fields__
    }

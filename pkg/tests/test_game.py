import json
import random
from fractions import Fraction

import pytest

from recipekit.game import (
    GameConfig,
    World,
    config_from_json,
    config_to_json,
    consumed,
    distance_on_x,
    distance_on_y,
    draw_world,
    game_over,
    handle_key,
    initial_world,
    make_posn,
    move_rocket,
    move_rocket_down,
    move_rocket_left,
    move_rocket_right,
    move_rocket_up,
    respawn,
    tick,
    world_to_json,
)
from recipekit.rng import Rng
from recipekit.values import Circ, EmptyScene, Place, Rect, Rotate

from .oracles import lcg_reference_stream

CFG = GameConfig()


def world(rocket=(100, 100), direction="up", flevel=10, gfuel=(400, 400), bfuel=(50, 400)):
    return World(
        make_posn(*rocket), direction, Fraction(flevel), make_posn(*gfuel), make_posn(*bfuel)
    )


def test_directional_moves_match_corpus_tests():
    assert move_rocket_up(make_posn(5, 15), CFG) == make_posn(5, 10)
    assert move_rocket_left(make_posn(32, 51), CFG) == make_posn(27, 51)
    assert move_rocket_right(make_posn(45, 18), CFG) == make_posn(50, 18)
    # corrected reading: down moves toward larger y on screen
    assert move_rocket_down(make_posn(100, 80), CFG) == make_posn(100, 85)


def test_moves_clamp_to_scene():
    assert move_rocket_up(make_posn(10, 2), CFG) == make_posn(10, 0)
    assert move_rocket_left(make_posn(3, 9), CFG) == make_posn(0, 9)
    assert move_rocket_down(make_posn(10, 499), CFG) == make_posn(10, 500)
    assert move_rocket_right(make_posn(498, 0), CFG) == make_posn(500, 0)


def test_move_rocket_dispatch_and_default():
    assert move_rocket(make_posn(45, 18), "right", CFG) == make_posn(50, 18)
    assert move_rocket(make_posn(98, 98), "left", CFG) == make_posn(93, 98)
    assert move_rocket(make_posn(100, 80), "down", CFG) == make_posn(100, 85)
    assert move_rocket(make_posn(5, 15), "up", CFG) == make_posn(5, 10)


def test_distances():
    a, b = make_posn(100, 340), make_posn(105, 335)
    assert distance_on_x(a, b) == 5 and distance_on_y(a, b) == 5
    p = make_posn(7, 9)
    assert distance_on_x(p, p) == 0 and distance_on_y(p, p) == 0
    a, b = make_posn(25, 10), make_posn(500, 450)
    assert distance_on_x(a, b) == 475 and distance_on_y(a, b) == 440


def test_consumed_matches_corpus_tests():
    assert consumed(make_posn(5, 20), make_posn(4, 20), 20, 20)
    assert not consumed(make_posn(25, 10), make_posn(320, 450), 20, 20)


def test_consumed_boundary_is_inclusive():
    assert consumed(make_posn(10, 0), make_posn(0, 0), 20, 20)
    assert not consumed(make_posn(10, Fraction(101, 10)), make_posn(10, 0), 20, 20)


def test_consumption_symmetric_under_axis_swap():
    rnd = random.Random(3)
    for _ in range(200):
        r = make_posn(rnd.randint(0, 50), rnd.randint(0, 50))
        f = make_posn(rnd.randint(0, 50), rnd.randint(0, 50))
        w, h = rnd.randint(1, 30), rnd.randint(1, 30)
        swapped = consumed(make_posn(r.y, r.x), make_posn(f.y, f.x), h, w)
        assert consumed(r, f, w, h) == swapped


def test_handle_key():
    w = world(direction="up")
    assert handle_key(w, "left").dir == "left"
    assert handle_key(w, "left").rocket == w.rocket
    assert handle_key(w, "a") == w
    assert handle_key(handle_key(w, "left"), "left") == handle_key(w, "left")


def test_tick_moves_and_drains():
    w2, _ = tick(world(), CFG, Rng(0))
    assert w2.rocket == make_posn(100, 95)
    assert w2.flevel == Fraction(99, 10)
    assert w2.gfuel == world().gfuel and w2.bfuel == world().bfuel


def test_tick_clamps_at_empty():
    w2, _ = tick(world(flevel=Fraction(1, 10)), CFG, Rng(0))
    assert w2.flevel == 0 and game_over(w2)


def test_good_fuel_consumption_clamps_and_respawns():
    # rocket at (100,100) moving up lands on (100,95); gfuel within reach
    w = world(rocket=(100, 100), flevel=Fraction(19, 2), gfuel=(105, 95))
    w2, rng = tick(w, CFG, Rng(42))
    assert w2.flevel == 10  # 9.5 - 0.1 + 2 clamped at max
    assert w2.gfuel == make_posn(284, 112)  # frozen LCG draws for seed 42
    assert w2.bfuel == w.bfuel


def test_bad_fuel_consumption_floors_at_zero():
    w = world(rocket=(100, 100), flevel=1, bfuel=(100, 95))
    w2, _ = tick(w, CFG, Rng(7))
    assert w2.flevel == 0
    assert w2.bfuel != w.bfuel  # respawned


def test_both_fuels_in_one_tick_draw_in_order():
    w = world(rocket=(100, 100), flevel=5, gfuel=(100, 95), bfuel=(95, 95))
    w2, _ = tick(w, CFG, Rng(42))
    stream = lcg_reference_stream(42, 4, 500)
    assert w2.gfuel == make_posn(stream[0], stream[1])
    assert w2.bfuel == make_posn(stream[2], stream[3])
    assert w2.flevel == Fraction(5) - Fraction(1, 10) + 2 - 2


def test_respawned_fuel_not_rechecked_same_tick():
    # respawn can land under the rocket; consumption happens next tick only
    w = world(rocket=(100, 100), flevel=5, gfuel=(100, 95))
    w2, rng = tick(w, CFG, Rng(1))
    assert w2.flevel == Fraction(69, 10)  # one good bump exactly


def test_game_over_iff_empty():
    assert game_over(world(flevel=0))
    assert not game_over(world(flevel=10))
    assert not game_over(world(flevel=Fraction(1, 10)))


def test_respawn_consumes_x_then_y():
    posn, _ = respawn(CFG, Rng(42))
    assert posn == make_posn(284, 112)


def test_initial_world_layout():
    w, _ = initial_world(CFG, Rng(42))
    assert w.rocket == make_posn(250, 250)
    assert w.dir == "up" and w.flevel == 10
    stream = lcg_reference_stream(42, 4, 500)
    assert w.gfuel == make_posn(stream[0], stream[1])
    assert w.bfuel == make_posn(stream[2], stream[3])


def test_draw_world_nesting_order():
    w = world(direction="up")
    scene = draw_world(w, CFG)
    assert isinstance(scene, Place) and isinstance(scene.image, Circ)  # bad fuel
    assert scene.image.color == "red"
    inner = scene.base
    assert isinstance(inner.image, Rect) and inner.image.color == "green"
    bar = inner.base
    assert bar.image.color == "purple"
    assert bar.x == 400 and bar.y == 50
    assert bar.image.width == 100  # flevel 10 x 10 px
    rocket_layer = bar.base
    assert isinstance(rocket_layer.base, EmptyScene)


def test_draw_world_rotations():
    for direction, expected in [("left", 90), ("down", 180), ("right", 270)]:
        scene = draw_world(world(direction=direction), CFG)
        rocket_img = scene.base.base.base.image
        assert isinstance(rocket_img, Rotate) and rocket_img.degrees == expected
    up_img = draw_world(world(direction="up"), CFG).base.base.base.image
    assert isinstance(up_img, Rect)


def test_empty_fuel_draws_zero_width_bar():
    scene = draw_world(world(flevel=0), CFG)
    assert scene.base.base.image.width == 0


def test_draw_world_pure():
    assert draw_world(world(), CFG) == draw_world(world(), CFG)


def test_world_json_shape():
    payload = world_to_json(world(flevel=Fraction(99, 10)))
    assert payload == {
        "rocket": {"x": 100, "y": 100},
        "dir": "up",
        "flevel": "99/10",
        "gfuel": {"x": 400, "y": 400},
        "bfuel": {"x": 50, "y": 400},
        "over": False,
    }


def test_config_validation_and_parsing():
    with pytest.raises(ValueError):
        GameConfig(width=0)
    with pytest.raises(ValueError):
        config_from_json({"delta": -1})
    with pytest.raises(ValueError):
        config_from_json({"no-such-knob": 3})
    cfg = config_from_json({"tick-dec": "1/5", "max_fuel": 4, "delta": 2.5})
    assert cfg.tick_dec == Fraction(1, 5)
    assert cfg.max_fuel == 4
    assert cfg.delta == Fraction(5, 2)
    assert config_to_json(CFG)["tick_dec"] == "1/10"


def test_direction_soundness():
    rnd = random.Random(6)
    for _ in range(200):
        w = world(rocket=(rnd.randint(10, 490), rnd.randint(10, 490)),
                  direction=rnd.choice(["up", "down", "left", "right"]))
        key = rnd.choice(["up", "down", "left", "right"])
        w2, _ = tick(handle_key(w, key), CFG, Rng(0))
        dx = w2.rocket.x - w.rocket.x
        dy = w2.rocket.y - w.rocket.y
        moved = {(0, -5): "up", (0, 5): "down", (-5, 0): "left", (5, 0): "right"}
        assert moved[(dx, dy)] == key


def test_trace_invariants_and_determinism():
    rnd = random.Random(12)
    for trial in range(60):
        seed = rnd.getrandbits(64)
        actions = [rnd.choice(["tick", "up", "down", "left", "right", "x"])
                   for _ in range(100)]

        def run():
            w, rng = initial_world(CFG, Rng(seed))
            frames = []
            for a in actions:
                if a == "tick":
                    w, rng = tick(w, CFG, rng)
                else:
                    w = handle_key(w, a)
                assert 0 <= w.flevel <= CFG.max_fuel
                for p in (w.rocket, w.gfuel, w.bfuel):
                    assert 0 <= p.x <= CFG.width and 0 <= p.y <= CFG.height
                assert game_over(w) == (w.flevel == 0)
                frames.append(json.dumps(world_to_json(w), sort_keys=True))
            return frames

        assert run() == run()

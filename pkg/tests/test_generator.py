from collections import Counter

import numpy as np
import pytest

from lodegen.chain import ChainTable, EntityStats
from lodegen.generator import (
    GenConfig,
    GenEvents,
    PartialCell,
    generate_level,
    generate_tiles,
    min_bounding_grid,
    place_entities,
    prespecify,
)
from lodegen.lstm import init_model
from lodegen.paths import PathSequence, overlay_path
from lodegen.tiles import NO_ACTION, parse_level


def test_bounding_straight_corridor():
    assert min_bounding_grid("rrr")[:2] == (4, 1)


def test_bounding_rfru():
    # trace by hand: (0,0)(1,0)(1,1)(2,1)(2,0) -> 3 wide, 2 tall
    w, h, start = min_bounding_grid("rfru")
    assert (w, h) == (3, 2)
    assert start == (0, 0)


def test_bounding_empty_path():
    assert min_bounding_grid("") == (1, 1, (0, 0))


def test_bounding_start_shifted_to_origin():
    w, h, start = min_bounding_grid("llu")
    assert (w, h) == (3, 2)
    assert start == (2, 1)


COMPAT = {"u": {"#"}, "l": {".", "b", "-"}, "r": {".", "b", "-"},
          "c": {"#", "."}, "f": {".", "-"}}


def test_prespecify_fixed_constrained_free():
    amap = ("u" + NO_ACTION + "l",)
    cells = prespecify((3, 1), amap, COMPAT)
    assert cells[0][0] == PartialCell.fixed("#")
    assert cells[0][1].kind == "free"
    assert cells[0][2].kind == "constrained"
    assert cells[0][2].allowed == frozenset({".", "b", "-"})


def test_prespecify_unknown_action_left_free():
    cells = prespecify((1, 1), ("u",), {})
    assert cells[0][0].kind == "free"


def point_mass_table(tile="."):
    table = ChainTable()
    table.marginal = Counter({tile: 1})
    return table


def test_generate_all_fixed_ignores_chain():
    partial = [[PartialCell.fixed("B"), PartialCell.fixed("#")]]
    amap = (NO_ACTION * 2,)
    grid = generate_tiles(partial, amap, ChainTable(), np.random.default_rng(0))
    assert grid.rows() == ["B#"]


def test_generate_point_mass_free_cells():
    partial = [[PartialCell.free(), PartialCell.free()]]
    amap = (NO_ACTION * 2,)
    grid = generate_tiles(partial, amap, point_mass_table("b"), np.random.default_rng(0))
    assert grid.rows() == ["bb"]


def test_generate_disjoint_support_uniform_fallback():
    partial = [[PartialCell.constrained({"#"})]]
    amap = (NO_ACTION,)
    events = GenEvents()
    grid = generate_tiles(partial, amap, point_mass_table("b"),
                          np.random.default_rng(0), events)
    assert grid.rows() == ["#"]
    assert events.fallback_draws == 1


def test_generate_restricted_renormalizes():
    table = ChainTable()
    table.marginal = Counter({".": 3, "b": 1, "#": 6})
    partial = [[PartialCell.constrained({".", "b"})] * 200]
    amap = (NO_ACTION * 200,)
    grid = generate_tiles(partial, amap, table, np.random.default_rng(0))
    counts = Counter(grid.rows()[0])
    assert set(counts) <= {".", "b"}
    assert counts["."] > counts["b"]  # 3:1 odds after renormalization


def zero_stats():
    return EntityStats((0.0, 0.0), (0.0, 0.0))


def test_place_entities_zero_stats_only_spawn():
    grid = parse_level("....")
    trace = [(0, 0), (1, 0), (2, 0), (3, 0)]
    out = place_entities(grid, trace, zero_stats(), np.random.default_rng(0))
    assert out.count("M") == 1
    assert out.get(0, 0) == "M"
    assert out.count("G") == 0 and out.count("E") == 0


def test_place_entities_rounded_count():
    # gold mean 0.1, std 0 over 103 actions -> round(10.3) = 10
    actions = "r" * 52 + "l" * 51
    trace = PathSequence((0, 0), actions).trace()
    grid = parse_level("." * 53)
    stats = EntityStats((0.1, 0.0), (0.0, 0.0))
    out = place_entities(grid, trace, stats, np.random.default_rng(0))
    assert out.count("G") == 10


def test_place_entities_clamped_to_eligible():
    grid = parse_level("....")
    trace = [(0, 0), (1, 0), (2, 0), (3, 0)]
    stats = EntityStats((10.0, 0.0), (0.0, 0.0))  # wants 30 gold
    events = GenEvents()
    out = place_entities(grid, trace, stats, np.random.default_rng(0), events)
    assert out.count("G") == 3  # visited minus start
    assert events.truncated["gold"] > 0


def test_entities_only_replace_empty_tiles():
    grid = parse_level(".b.#")
    trace = [(0, 0), (1, 0), (2, 0), (3, 0)]
    stats = EntityStats((10.0, 0.0), (10.0, 0.0))
    out = place_entities(grid, trace, stats, np.random.default_rng(1))
    assert out.get(1, 0) == "b" and out.get(3, 0) == "#"


def pipeline_models():
    table = point_mass_table(".")
    lstm = init_model(4, 2, seed=0)
    return lstm, table, COMPAT, zero_stats()


def test_generate_level_deterministic_per_seed():
    lstm, table, compat, stats = pipeline_models()
    config = GenConfig(path_length=40, seed=9)
    level1, meta1 = generate_level(config, lstm, table, compat, stats)
    level2, meta2 = generate_level(config, lstm, table, compat, stats)
    assert level1 == level2
    assert meta1 == meta2


def test_generate_level_path_length_zero():
    lstm, table, compat, stats = pipeline_models()
    level, meta = generate_level(GenConfig(path_length=0, seed=0),
                                 lstm, table, compat, stats)
    assert (level.grid.width, level.grid.height) == (1, 1)
    assert level.grid.get(0, 0) == "M"


def test_generate_level_dims_equal_bounding_box():
    lstm, table, compat, stats = pipeline_models()
    for seed in range(5):
        level, meta = generate_level(GenConfig(path_length=60, seed=seed),
                                     lstm, table, compat, stats)
        w, h, _ = min_bounding_grid(meta["path_actions"])
        assert (level.grid.width, level.grid.height) == (w, h)
        assert level.grid.count("M") == 1


def test_generate_level_explicit_actions_skips_lstm():
    _, table, compat, stats = pipeline_models()
    level, meta = generate_level(GenConfig(seed=3), None, table, compat, stats,
                                 actions="rrrr")
    assert meta["path_actions"] == "rrrr"
    assert (level.grid.width, level.grid.height) == (5, 1)
    assert level.grid.get(0, 0) == "M"


def test_generated_u_cells_hold_compat_tiles():
    lstm, table, compat, stats = pipeline_models()
    for seed in range(10):
        level, _ = generate_level(GenConfig(path_length=50, seed=seed),
                                  lstm, table, compat, stats)
        for y in range(level.grid.height):
            for x in range(level.grid.width):
                a = level.action_at(x, y)
                if a == "u":
                    assert level.grid.get(x, y) in compat["u"] | {"M"}

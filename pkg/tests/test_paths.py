import pytest
from hypothesis import given
from hypothesis import strategies as st

from lodegen.errors import BoundsError, TraceError
from lodegen.paths import (
    PathSequence,
    actions_from_trace,
    annotated_from_json,
    annotated_to_json,
    AnnotatedLevel,
    load_path_file,
    dump_path_file,
    overlay_path,
    parse_path_line,
    trace_path,
)
from lodegen.tiles import NO_ACTION, parse_level

actions_st = st.text(alphabet="lrucf", max_size=30)


def test_trace_right_twice():
    assert trace_path((0, 0), "rr") == [(0, 0), (1, 0), (2, 0)]


def test_trace_up_decreases_row():
    assert trace_path((0, 1), "u") == [(0, 1), (0, 0)]


def test_trace_rfl():
    # displacement table applied by hand
    assert trace_path((0, 0), "rfl") == [(0, 0), (1, 0), (1, 1), (0, 1)]


def test_actions_from_trace_basic():
    assert actions_from_trace([(0, 0), (1, 0)]) == "r"
    assert actions_from_trace([(0, 0), (0, 1)]) == "f"


def test_actions_from_trace_ladder_context():
    grid = parse_level("#\n#")
    assert actions_from_trace([(0, 0), (0, 1)], grid) == "c"


def test_actions_from_trace_non_adjacent():
    with pytest.raises(TraceError):
        actions_from_trace([(0, 0), (2, 0)])


@given(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), actions_st)
def test_round_trip_without_climb(start, actions):
    # the c/f ambiguity is the only lossy case
    actions = actions.replace("c", "f")
    assert actions_from_trace(trace_path(start, actions)) == actions


@given(actions_st)
def test_trace_length_invariant(actions):
    assert len(trace_path((0, 0), actions)) == len(actions) + 1


def test_overlay_departure_rule():
    amap = overlay_path((3, 1), PathSequence((0, 0), "rr"))
    assert amap == ("rrr",)


def test_overlay_empty_actions_all_blank():
    amap = overlay_path((2, 2), PathSequence((0, 0), ""))
    assert amap == (NO_ACTION * 2, NO_ACTION * 2)


def test_overlay_out_of_bounds():
    with pytest.raises(BoundsError):
        overlay_path((2, 1), PathSequence((0, 0), "rr"))


def test_overlay_revisit_keeps_latest_action():
    # r then l returns to the start; latest departure wins on (1,0),
    # and the final cell (0,0) inherits the last action.
    amap = overlay_path((2, 1), PathSequence((0, 0), "rl"))
    assert amap == ("ll",)


@given(st.data())
def test_overlay_marks_exactly_visited_cells(data):
    actions = data.draw(actions_st)
    path = PathSequence((0, 0), actions).normalized()
    coords = path.trace()
    w = max(c[0] for c in coords) + 1
    h = max(c[1] for c in coords) + 1
    amap = overlay_path((w, h), path)
    marked = sum(ch != NO_ACTION for row in amap for ch in row)
    expected = len(set(coords)) if actions else 0
    assert marked == expected


def test_normalized_shifts_minima_to_zero():
    p = PathSequence((0, 0), "luu").normalized()
    coords = p.trace()
    assert min(c[0] for c in coords) == 0
    assert min(c[1] for c in coords) == 0


def test_path_file_round_trip():
    text = "2,3:rrul\nff\n"
    paths = load_path_file(text)
    assert paths[0] == PathSequence((2, 3), "rrul")
    assert paths[1] == PathSequence((0, 0), "ff")
    assert dump_path_file(paths) == "2,3:rrul\n0,0:ff\n"


def test_parse_path_line_rejects_bad_symbols():
    with pytest.raises(TraceError):
        parse_path_line("rrx")


def test_annotated_json_round_trip():
    grid = parse_level("B.\n.M")
    amap = overlay_path((2, 2), PathSequence((1, 0), "c"))
    level = AnnotatedLevel(grid, amap)
    doc = annotated_to_json(level)
    assert NO_ACTION not in "".join(doc["actions"])
    assert annotated_from_json(doc) == level

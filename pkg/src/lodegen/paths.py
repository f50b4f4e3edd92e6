"""Player paths: traces, action extraction, annotation and file formats."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import BoundsError, FormatError, TraceError
from .tiles import ACTIONS, DISPLACEMENT, LADDER, NO_ACTION, TileGrid

Coord = tuple[int, int]


@dataclass(frozen=True)
class PathSequence:
    """An action string anchored at a start cell.

    `start` is given in whatever coordinate frame the path lives in (level
    coordinates for corpus paths).  `normalized()` shifts the anchor so the
    visited trace has minimum column and row 0, which is the frame the
    generator works in.
    """

    start: Coord
    actions: str

    def __post_init__(self):
        bad = set(self.actions) - set(ACTIONS)
        if bad:
            raise TraceError(f"invalid action symbols: {sorted(bad)}")

    def trace(self) -> list[Coord]:
        return trace_path(self.start, self.actions)

    def normalized(self) -> "PathSequence":
        coords = self.trace()
        min_x = min(c[0] for c in coords)
        min_y = min(c[1] for c in coords)
        return PathSequence(
            (self.start[0] - min_x, self.start[1] - min_y), self.actions
        )


def trace_path(start: Coord, actions: str) -> list[Coord]:
    """Coordinates visited when applying `actions` from `start`.

    The result has length len(actions) + 1 and may contain negative
    coordinates; callers normalize.
    """
    x, y = start
    coords = [(x, y)]
    for a in actions:
        dx, dy = DISPLACEMENT[a]
        x, y = x + dx, y + dy
        coords.append((x, y))
    return coords


def actions_from_trace(coords: list[Coord], grid: TileGrid | None = None) -> str:
    """Recover the action string from a coordinate trace.

    A downward step maps to 'f' unless `grid` is given and the departing
    cell holds a ladder, in which case it maps to 'c'.
    """
    actions = []
    for (x0, y0), (x1, y1) in zip(coords, coords[1:]):
        dx, dy = x1 - x0, y1 - y0
        if (dx, dy) == (-1, 0):
            actions.append("l")
        elif (dx, dy) == (1, 0):
            actions.append("r")
        elif (dx, dy) == (0, -1):
            actions.append("u")
        elif (dx, dy) == (0, 1):
            if grid is not None and grid.in_bounds(x0, y0) and grid.get(x0, y0) == LADDER:
                actions.append("c")
            else:
                actions.append("f")
        else:
            raise TraceError(f"non-adjacent step ({x0},{y0}) -> ({x1},{y1})")
    return "".join(actions)


@dataclass(frozen=True)
class AnnotatedLevel:
    """A level grid plus a per-cell action map ('∅' off the path)."""

    grid: TileGrid
    actionmap: tuple[str, ...]  # one string per row

    def __post_init__(self):
        if len(self.actionmap) != self.grid.height or any(
            len(r) != self.grid.width for r in self.actionmap
        ):
            raise FormatError("actionmap dimensions do not match grid")

    def action_at(self, x: int, y: int) -> str:
        return self.actionmap[y][x]


def overlay_path(grid_dims: tuple[int, int], path: PathSequence) -> tuple[str, ...]:
    """Per-cell action map for a path inside a (width, height) grid.

    Each visited cell carries the action taken when departing it; the final
    trace cell inherits the last action; revisited cells keep the action of
    the latest visit; everything else is '∅'.
    """
    width, height = grid_dims
    coords = path.trace()
    for x, y in coords:
        if not (0 <= x < width and 0 <= y < height):
            raise BoundsError(f"trace cell ({x},{y}) outside {width}x{height} grid")
    amap = [[NO_ACTION] * width for _ in range(height)]
    for (x, y), a in zip(coords, path.actions):
        amap[y][x] = a
    if path.actions:
        fx, fy = coords[-1]
        amap[fy][fx] = path.actions[-1]
    return tuple("".join(row) for row in amap)


# --- file formats -----------------------------------------------------------

def parse_path_line(line: str) -> PathSequence:
    """One path per line: optional 'COL,ROW:' prefix, then action characters."""
    line = line.strip()
    start = (0, 0)
    if ":" in line:
        prefix, line = line.split(":", 1)
        try:
            col, row = prefix.split(",")
            start = (int(col), int(row))
        except ValueError as exc:
            raise FormatError(f"bad path start prefix {prefix!r}") from exc
    return PathSequence(start, line)


def load_path_file(text: str) -> list[PathSequence]:
    return [parse_path_line(ln) for ln in text.splitlines() if ln.strip()]


def dump_path_file(paths: list[PathSequence]) -> str:
    return "".join(f"{p.start[0]},{p.start[1]}:{p.actions}\n" for p in paths)


def annotated_to_json(level: AnnotatedLevel) -> dict:
    """JSON form; '∅' is rendered as '.' in the action rows."""
    return {
        "width": level.grid.width,
        "height": level.grid.height,
        "tiles": level.grid.rows(),
        "actions": [row.replace(NO_ACTION, ".") for row in level.actionmap],
    }


def annotated_from_json(doc: dict) -> AnnotatedLevel:
    grid = TileGrid(
        doc["width"], doc["height"], tuple("".join(doc["tiles"]))
    )
    amap = tuple(row.replace(".", NO_ACTION) for row in doc["actions"])
    return AnnotatedLevel(grid, amap)


def dumps_annotated(level: AnnotatedLevel) -> str:
    return json.dumps(annotated_to_json(level), sort_keys=True, indent=2)

"""Tiles, actions and the level grid.

Coordinate convention: (x, y) = (column, row) with row 0 at the top of the
level, matching the reading order of the plain-text level files.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FormatError, SymbolError

# VGLC Lode Runner tile alphabet.
EMPTY = "."
BRICK = "b"          # diggable
SOLID = "B"
LADDER = "#"
ROPE = "-"
GOLD = "G"
ENEMY = "E"
SPAWN = "M"

TILES = frozenset({EMPTY, BRICK, SOLID, LADDER, ROPE, GOLD, ENEMY, SPAWN})

# Player action alphabet, in the fixed one-hot encoding order.
ACTIONS = "lrucf"

# Displacement (dx, dy) of each action; 'u' decreases the row because row 0
# is the top of the level.
DISPLACEMENT = {
    "l": (-1, 0),
    "r": (1, 0),
    "u": (0, -1),
    "c": (0, 1),
    "f": (0, 1),
}

# Marker for cells no action touches, and for out-of-bounds neighbours in
# Markov-chain keys.
NO_ACTION = "∅"
OOB = "X"


@dataclass(frozen=True)
class TileGrid:
    """Rectangular grid of tile symbols, row-major."""

    width: int
    height: int
    cells: tuple[str, ...]

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise FormatError("grid dimensions must be at least 1x1")
        if len(self.cells) != self.width * self.height:
            raise FormatError(
                f"cell count {len(self.cells)} != {self.width}x{self.height}"
            )

    def get(self, x: int, y: int) -> str:
        return self.cells[y * self.width + x]

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def rows(self) -> list[str]:
        w = self.width
        return ["".join(self.cells[y * w : (y + 1) * w]) for y in range(self.height)]

    def with_cell(self, x: int, y: int, tile: str) -> "TileGrid":
        cells = list(self.cells)
        cells[y * self.width + x] = tile
        return TileGrid(self.width, self.height, tuple(cells))

    def count(self, tile: str) -> int:
        return self.cells.count(tile)

    def find_all(self, tile: str) -> list[tuple[int, int]]:
        w = self.width
        return [(i % w, i // w) for i, t in enumerate(self.cells) if t == tile]


def parse_level(text: str) -> TileGrid:
    """Parse a plain-text level (one row per line) into a TileGrid."""
    lines = text.splitlines()
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError("empty level text")
    width = len(lines[0])
    cells = []
    for y, line in enumerate(lines):
        if len(line) != width:
            raise FormatError(f"ragged line {y}: length {len(line)} != {width}")
        for x, ch in enumerate(line):
            if ch not in TILES:
                raise SymbolError(ch, x, y)
            cells.append(ch)
    return TileGrid(width, len(lines), tuple(cells))


def serialize_level(grid: TileGrid) -> str:
    """Inverse of parse_level; ends with a trailing newline."""
    return "\n".join(grid.rows()) + "\n"

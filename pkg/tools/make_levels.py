"""Build the bundled level corpus under data/levels/.

Produces deterministic 32x22 levels in the plain-text tile encoding:
a solid ground row, brick platforms with gaps, ladders punched through
the platforms, ropes, gold and enemies on walkable rows, one spawn.
Run from the repository root:  python tools/make_levels.py
"""

from pathlib import Path

import numpy as np

W, H = 32, 22


def build_level(rng: np.random.Generator) -> str:
    grid = [["."] * W for _ in range(H)]
    grid[H - 1] = ["B"] * W

    # Platform brick rows, bottom-up.  The walk row of each platform is the
    # row directly above it.
    plat_rows = []
    y = H - 1
    while True:
        y -= int(rng.integers(3, 5))
        if y < 3:
            break
        plat_rows.append(y)

    for py in plat_rows:
        x = 0
        while x < W:
            run = int(rng.integers(7, 16))
            gap = int(rng.integers(1, 3))
            for i in range(run):
                if x + i < W:
                    grid[py][x + i] = "b" if rng.random() < 0.7 else "B"
            x += run + gap

    # Ladders between consecutive floors; each spans from the walk row of
    # the upper platform down to the walk row of the lower one, replacing
    # the platform brick with a climb-through hole.  Bases sit on columns
    # where the lower floor has brick, so the foot is always walkable-to.
    floors = [H - 1] + plat_rows
    for lower, upper in zip(floors, floors[1:]):
        candidates = [c for c in range(1, W - 1) if grid[lower][c] in "bB"]
        rng.shuffle(candidates)
        for c in candidates[: int(rng.integers(3, 6))]:
            for yy in range(upper - 1, lower):
                grid[yy][c] = "#"

    # A rope strand or two in the open air above platforms.
    for _ in range(int(rng.integers(1, 3))):
        py = int(rng.choice(plat_rows))
        ry = py - 2
        if ry < 1:
            continue
        x0 = int(rng.integers(0, W - 8))
        for x in range(x0, x0 + int(rng.integers(4, 9))):
            if grid[ry][x] == ".":
                grid[ry][x] = "-"

    def walk_cells():
        cells = []
        for py in floors:
            wy = py - 1
            for x in range(W):
                if grid[wy][x] == "." and grid[py][x] in ("b", "B"):
                    cells.append((x, wy))
        return cells

    # Spread gold across every floor so solution tours climb the level.
    cells = walk_cells()
    per_floor: dict[int, list[tuple[int, int]]] = {}
    for x, y in cells:
        per_floor.setdefault(y, []).append((x, y))
    for floor_cells in per_floor.values():
        rng.shuffle(floor_cells)
        for x, y in floor_cells[: int(rng.integers(2, 4))]:
            grid[y][x] = "G"
    rng.shuffle(cells)
    n_enemy = int(rng.integers(2, 6))
    placed = 0
    for x, y in cells:
        if placed >= n_enemy:
            break
        if grid[y][x] == ".":
            grid[y][x] = "E"
            placed += 1

    # Guarantee at least one trivially reachable gold on the ground row.
    gx = int(rng.integers(W // 2, W - 1))
    grid[H - 2][gx] = "G"

    # Spawn near the bottom-left, on the ground walk row.
    mx = int(rng.integers(0, 4))
    grid[H - 2][mx] = "M"

    return "\n".join("".join(row) for row in grid) + "\n"


def main():
    root = Path(__file__).resolve().parent.parent
    rng = np.random.default_rng(20260823)
    for subset, count in (("train", 34), ("heldout", 34)):
        outdir = root / "data" / "levels" / subset
        outdir.mkdir(parents=True, exist_ok=True)
        for i in range(count):
            (outdir / f"{subset}_{i:03d}.txt").write_text(build_level(rng))
    print("wrote 68 levels under data/levels/")


if __name__ == "__main__":
    main()

"""Level generation: sizing, constraints, scan-order sampling, entities."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .chain import ChainTable, EntityStats, chain_lookup
from .lstm import LstmModel, sample_path
from .paths import AnnotatedLevel, PathSequence, overlay_path, trace_path
from .tiles import EMPTY, NO_ACTION, OOB, SPAWN, TileGrid

log = logging.getLogger(__name__)


@dataclass
class GenConfig:
    path_length: int = 103
    seed: int = 0
    max_width: int = 32    # reporting only; never enforced
    max_height: int = 22
    entity_floor: int = 0

    def validate(self):
        if self.path_length < 0:
            raise ValueError("path_length must be >= 0")


@dataclass(frozen=True)
class PartialCell:
    """Pre-generation cell state: fixed tile, allowed set, or free."""

    kind: str                      # "fixed" | "constrained" | "free"
    tile: str | None = None
    allowed: frozenset[str] = frozenset()

    @classmethod
    def fixed(cls, tile: str) -> "PartialCell":
        return cls("fixed", tile=tile)

    @classmethod
    def constrained(cls, tiles) -> "PartialCell":
        return cls("constrained", allowed=frozenset(tiles))

    @classmethod
    def free(cls) -> "PartialCell":
        return cls("free")


def min_bounding_grid(actions: str) -> tuple[int, int, tuple[int, int]]:
    """Smallest (width, height) containing the path, plus the shifted start."""
    coords = trace_path((0, 0), actions)
    xs = [c[0] for c in coords]
    ys = [c[1] for c in coords]
    width = max(xs) - min(xs) + 1
    height = max(ys) - min(ys) + 1
    return width, height, (-min(xs), -min(ys))


def prespecify(
    dims: tuple[int, int],
    actionmap: tuple[str, ...],
    compat: dict[str, set[str]],
) -> list[list[PartialCell]]:
    """Turn per-cell actions into tile constraints via the compat map."""
    width, height = dims
    grid = []
    for y in range(height):
        row = []
        for x in range(width):
            action = actionmap[y][x]
            if action == NO_ACTION:
                row.append(PartialCell.free())
                continue
            allowed = compat.get(action, set())
            if not allowed:
                log.warning("no compat tiles for action %r; cell left free", action)
                row.append(PartialCell.free())
            elif len(allowed) == 1:
                row.append(PartialCell.fixed(next(iter(allowed))))
            else:
                row.append(PartialCell.constrained(allowed))
        grid.append(row)
    return grid


@dataclass
class GenEvents:
    """Degenerate-branch bookkeeping surfaced in the sidecar JSON."""

    fallback_draws: int = 0
    truncated: dict[str, int] = field(default_factory=dict)


def generate_tiles(
    partial: list[list[PartialCell]],
    actionmap: tuple[str, ...],
    table: ChainTable,
    rng: np.random.Generator,
    events: GenEvents | None = None,
) -> TileGrid:
    """Fill the grid bottom-left to top-right from the Markov chain.

    Fixed cells are kept; constrained cells sample from the chain
    distribution renormalized over the allowed set (uniform over the set
    when the intersection is empty); free cells sample unrestricted.
    """
    height = len(partial)
    width = len(partial[0])
    tiles = [[EMPTY] * width for _ in range(height)]
    for y in range(height - 1, -1, -1):
        for x in range(width):
            cell = partial[y][x]
            if cell.kind == "fixed":
                tiles[y][x] = cell.tile
                continue
            key = (
                tiles[y][x - 1] if x > 0 else OOB,
                tiles[y + 1][x] if y + 1 < height else OOB,
                actionmap[y][x],
                actionmap[y][x + 1] if x + 1 < width else OOB,
                actionmap[y - 1][x] if y > 0 else OOB,
            )
            dist = chain_lookup(table, key)
            if cell.kind == "constrained":
                restricted = {t: p for t, p in dist.items() if t in cell.allowed}
                if not restricted:
                    log.warning(
                        "chain support disjoint from allowed set at (%d,%d); "
                        "uniform fallback", x, y,
                    )
                    if events is not None:
                        events.fallback_draws += 1
                    options = sorted(cell.allowed)
                    tiles[y][x] = options[rng.integers(len(options))]
                    continue
                dist = restricted
            options = sorted(dist)
            probs = np.array([dist[t] for t in options])
            probs /= probs.sum()
            tiles[y][x] = options[rng.choice(len(options), p=probs)]
    return TileGrid(width, height, tuple(t for row in tiles for t in row))


def _sample_nonneg(rng: np.random.Generator, mean: float, std: float) -> float:
    """Gaussian draw, resampled while negative."""
    if std == 0.0:
        return max(mean, 0.0)
    while True:
        v = rng.normal(mean, std)
        if v >= 0.0:
            return v


def place_entities(
    grid: TileGrid,
    trace: list[tuple[int, int]],
    stats: EntityStats,
    rng: np.random.Generator,
    events: GenEvents | None = None,
) -> TileGrid:
    """Place gold and enemies on empty visited cells; spawn at path start.

    Counts come from the fitted Gaussians times the action count, rounded
    half-up and clamped to the eligible cells.
    """
    n_actions = len(trace) - 1
    visited = list(dict.fromkeys(trace))  # unique, first-visit order
    start = trace[0]
    gold_n = int(_sample_nonneg(rng, *stats.gold_ratio) * n_actions + 0.5)
    enemy_n = int(_sample_nonneg(rng, *stats.enemy_ratio) * n_actions + 0.5)

    eligible = [c for c in visited if c != start and grid.get(*c) == EMPTY]
    out = grid
    for tile, want, label in ((("G"), gold_n, "gold"), (("E"), enemy_n, "enemy")):
        if want > len(eligible):
            log.warning(
                "wanted %d %s but only %d eligible cells", want, label, len(eligible)
            )
            if events is not None:
                events.truncated[label] = want - len(eligible)
            want = len(eligible)
        if want:
            picks = rng.choice(len(eligible), size=want, replace=False)
            chosen = [eligible[i] for i in picks]
            for c in chosen:
                out = out.with_cell(c[0], c[1], tile)
            eligible = [c for c in eligible if c not in set(chosen)]
    return out.with_cell(start[0], start[1], SPAWN)


def generate_level(
    config: GenConfig,
    lstm: LstmModel | None,
    table: ChainTable,
    compat: dict[str, set[str]],
    stats: EntityStats,
    actions: str | None = None,
) -> tuple[AnnotatedLevel, dict]:
    """Full pipeline: path -> bounding grid -> constraints -> tiles -> entities.

    When `actions` is supplied the LSTM is skipped entirely.  Returns the
    annotated level and a metadata dict (seed, size, counts, events).
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    if actions is None:
        if lstm is None:
            raise ValueError("either a path model or an explicit action string")
        actions = sample_path(lstm, config.path_length, rng)
    width, height, start = min_bounding_grid(actions)
    path = PathSequence(start, actions)
    actionmap = overlay_path((width, height), path)
    partial = prespecify((width, height), actionmap, compat)
    events = GenEvents()
    tiles = generate_tiles(partial, actionmap, table, rng, events)
    tiles = place_entities(tiles, path.trace(), stats, rng, events)
    level = AnnotatedLevel(tiles, actionmap)
    meta = {
        "seed": config.seed,
        "width": width,
        "height": height,
        "path_start": list(start),
        "path_actions": actions,
        "gold": tiles.count("G"),
        "enemies": tiles.count("E"),
        "fallback_draws": events.fallback_draws,
        "truncated": events.truncated,
    }
    return level, meta

"""Path-conditioned multi-dimensional Markov chain over level tiles.

A cell's tile is conditioned on the tile to its left, the tile below, and
the player actions at the cell itself, to its right, and above it.  Keys
that were never observed back off to (left, below) alone, and finally to
the global tile marginal, so lookups are total.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field

from .errors import AlignmentError, CorpusError
from .paths import AnnotatedLevel, PathSequence
from .tiles import EMPTY, ENEMY, GOLD, NO_ACTION, OOB, SPAWN, TileGrid

log = logging.getLogger(__name__)

CHAIN_VERSION = 1

# ChainKey: (tile_left, tile_below, action_here, action_right, action_above)
ChainKey = tuple[str, str, str, str, str]

# Entities are placed from EntityStats, never by the chain; normalizing them
# away before counting keeps the chain from emitting stray G/E/M tiles.
_ENTITY_TILES = {GOLD, ENEMY, SPAWN}


def normalize_tile(tile: str) -> str:
    return EMPTY if tile in _ENTITY_TILES else tile


@dataclass
class ChainTable:
    full: dict[ChainKey, Counter] = field(default_factory=dict)
    backoff: dict[tuple[str, str], Counter] = field(default_factory=dict)
    marginal: Counter = field(default_factory=Counter)

    def merge(self, other: "ChainTable") -> None:
        for key, counts in other.full.items():
            self.full.setdefault(key, Counter()).update(counts)
        for key, counts in other.backoff.items():
            self.backoff.setdefault(key, Counter()).update(counts)
        self.marginal.update(other.marginal)


def _distribution(counts: Counter) -> dict[str, float]:
    total = sum(counts.values())
    return {tile: n / total for tile, n in counts.items()}


def cell_key(level: AnnotatedLevel, x: int, y: int, tiles: TileGrid | None = None) -> ChainKey:
    """Conditioning key for cell (x, y); out-of-grid neighbours become OOB.

    `tiles` overrides the tile source (used during generation where tiles
    come from the partially generated grid, actions from the annotation).
    """
    grid = tiles if tiles is not None else level.grid
    tile_left = normalize_tile(grid.get(x - 1, y)) if x > 0 else OOB
    tile_below = normalize_tile(grid.get(x, y + 1)) if y + 1 < grid.height else OOB
    action_here = level.action_at(x, y)
    action_right = level.action_at(x + 1, y) if x + 1 < grid.width else OOB
    action_above = level.action_at(x, y - 1) if y > 0 else OOB
    return (tile_left, tile_below, action_here, action_right, action_above)


def train_chain(annotated: list[AnnotatedLevel]) -> ChainTable:
    """Count every cell's tile under its full key and its backoff key."""
    if not annotated:
        raise CorpusError("no annotated levels")
    table = ChainTable()
    for level in annotated:
        for y in range(level.grid.height):
            for x in range(level.grid.width):
                tile = normalize_tile(level.grid.get(x, y))
                key = cell_key(level, x, y)
                table.full.setdefault(key, Counter())[tile] += 1
                table.backoff.setdefault(key[:2], Counter())[tile] += 1
                table.marginal[tile] += 1
    return table


def chain_lookup(table: ChainTable, key: ChainKey) -> dict[str, float]:
    """Three-tier lookup: full key, (left, below) backoff, global marginal."""
    counts = table.full.get(key)
    if counts is None:
        counts = table.backoff.get(key[:2])
    if counts is None:
        log.warning("chain key %r fell through to the global marginal", key)
        counts = table.marginal
    return _distribution(counts)


def build_compat(annotated: list[AnnotatedLevel]) -> dict[str, set[str]]:
    """Tiles observed co-located with each action in the corpus."""
    compat: dict[str, set[str]] = {}
    for level in annotated:
        for y in range(level.grid.height):
            for x in range(level.grid.width):
                action = level.action_at(x, y)
                if action == NO_ACTION:
                    continue
                compat.setdefault(action, set()).add(
                    normalize_tile(level.grid.get(x, y))
                )
    return compat


@dataclass(frozen=True)
class EntityStats:
    gold_ratio: tuple[float, float]   # (mean, std)
    enemy_ratio: tuple[float, float]


def _mean_std(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, var ** 0.5


def fit_entity_stats(levels: list[TileGrid], paths: list[PathSequence]) -> EntityStats:
    """Gaussian fit of gold/path-length and enemy/path-length ratios."""
    if len(levels) != len(paths):
        raise AlignmentError(f"{len(levels)} levels vs {len(paths)} paths")
    if not levels:
        raise CorpusError("no levels to fit entity stats")
    gold, enemy = [], []
    for grid, path in zip(levels, paths):
        if not path.actions:
            log.warning("zero-length path skipped in entity stats")
            continue
        n = len(path.actions)
        gold.append(grid.count(GOLD) / n)
        enemy.append(grid.count(ENEMY) / n)
    if not gold:
        raise CorpusError("no usable level/path pairs for entity stats")
    return EntityStats(_mean_std(gold), _mean_std(enemy))


# --- serialization ----------------------------------------------------------

def _key_to_str(key) -> str:
    return "".join(key)


def models_to_json(table: ChainTable, compat: dict[str, set[str]], stats: EntityStats) -> dict:
    return {
        "version": CHAIN_VERSION,
        "full": {_key_to_str(k): dict(c) for k, c in table.full.items()},
        "backoff": {_key_to_str(k): dict(c) for k, c in table.backoff.items()},
        "marginal": dict(table.marginal),
        "compat": {a: "".join(sorted(ts)) for a, ts in compat.items()},
        "entity_stats": {
            "gold_ratio": list(stats.gold_ratio),
            "enemy_ratio": list(stats.enemy_ratio),
        },
    }


def models_from_json(doc: dict) -> tuple[ChainTable, dict[str, set[str]], EntityStats]:
    if doc.get("version") != CHAIN_VERSION:
        raise CorpusError(f"unsupported chain model version {doc.get('version')}")
    table = ChainTable(
        full={tuple(k): Counter(v) for k, v in doc["full"].items()},
        backoff={tuple(k): Counter(v) for k, v in doc["backoff"].items()},
        marginal=Counter(doc["marginal"]),
    )
    compat = {a: set(ts) for a, ts in doc["compat"].items()}
    es = doc["entity_stats"]
    stats = EntityStats(tuple(es["gold_ratio"]), tuple(es["enemy_ratio"]))
    return table, compat, stats


def save_models(path: str, table: ChainTable, compat, stats) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(models_to_json(table, compat, stats), fh, sort_keys=True)


def load_models(path: str):
    with open(path, encoding="utf-8") as fh:
        return models_from_json(json.load(fh))

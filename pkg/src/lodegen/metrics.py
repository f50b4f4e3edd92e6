"""Level metrics, the Mann-Whitney U test, and set-vs-set comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

from .agent import astar_to_goal, find_spawn
from .errors import InputError
from .tiles import EMPTY, ENEMY, GOLD, LADDER, ROPE, SPAWN, TileGrid

# Tiles that are neither plain empty space nor brick.
_INTERESTING = {LADDER, ROPE, GOLD, ENEMY, SPAWN}

EXACT_TEST_LIMIT = 12  # pooled size at or below which the U test enumerates


@dataclass
class LevelMetrics:
    gold_total: int
    percent_collected: float
    total_nodes_explored: int
    nodes_per_gold: float
    size: tuple[int, int]
    empty_prop: float
    interesting_prop: float

    def as_dict(self) -> dict:
        return {
            "gold_total": self.gold_total,
            "percent_collected": self.percent_collected,
            "total_nodes_explored": self.total_nodes_explored,
            "nodes_per_gold": self.nodes_per_gold,
            "width": self.size[0],
            "height": self.size[1],
            "empty_prop": self.empty_prop,
            "interesting_prop": self.interesting_prop,
        }


METRIC_FIELDS = [
    "gold_total",
    "percent_collected",
    "total_nodes_explored",
    "nodes_per_gold",
    "width",
    "height",
    "empty_prop",
    "interesting_prop",
]


def evaluate_level(grid: TileGrid) -> LevelMetrics:
    """Run one A* search from spawn to each gold and compute all metrics.

    Nodes explored while chasing unreachable gold are excluded from the
    totals; a gold-free level counts as 100% collected.
    """
    spawn = find_spawn(grid)
    golds = grid.find_all(GOLD)
    reached = 0
    total_nodes = 0
    for gold in golds:
        result = astar_to_goal(grid, spawn, gold)
        if result.reached:
            reached += 1
            total_nodes += result.nodes_explored
    n_cells = grid.width * grid.height
    return LevelMetrics(
        gold_total=len(golds),
        percent_collected=100.0 * reached / len(golds) if golds else 100.0,
        total_nodes_explored=total_nodes,
        nodes_per_gold=total_nodes / reached if reached else 0.0,
        size=(grid.width, grid.height),
        empty_prop=grid.count(EMPTY) / n_cells,
        interesting_prop=sum(grid.count(t) for t in _INTERESTING) / n_cells,
    )


# --- Mann-Whitney U ---------------------------------------------------------

def _midranks(values: list[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        midrank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = midrank
        i = j + 1
    return ranks


def _u_statistic(pooled_ranks: list[float], idx_a, n_a: int, n_b: int) -> float:
    rank_sum_a = sum(pooled_ranks[i] for i in idx_a)
    return rank_sum_a - n_a * (n_a + 1) / 2


def mann_whitney_u(sample_a: list[float], sample_b: list[float]) -> tuple[float, float]:
    """Two-sided Mann-Whitney U test with midrank tie handling.

    Returns (U for sample_a, two-sided p).  p is exact (enumeration over
    all label assignments) when the pooled size is at most 12, otherwise a
    normal approximation with tie and continuity corrections.
    """
    if not sample_a or not sample_b:
        raise InputError("both samples must be nonempty")
    n_a, n_b = len(sample_a), len(sample_b)
    pooled = list(sample_a) + list(sample_b)
    ranks = _midranks(pooled)
    u = _u_statistic(ranks, range(n_a), n_a, n_b)
    mu = n_a * n_b / 2

    if n_a + n_b <= EXACT_TEST_LIMIT:
        observed = abs(u - mu)
        hits = 0
        total = 0
        for idx in combinations(range(n_a + n_b), n_a):
            u_perm = _u_statistic(ranks, idx, n_a, n_b)
            if abs(u_perm - mu) >= observed - 1e-12:
                hits += 1
            total += 1
        return u, hits / total

    n = n_a + n_b
    tie_term = 0.0
    seen: dict[float, int] = {}
    for v in pooled:
        seen[v] = seen.get(v, 0) + 1
    for count in seen.values():
        tie_term += count ** 3 - count
    sigma_sq = n_a * n_b / 12 * ((n + 1) - tie_term / (n * (n - 1)))
    if sigma_sq <= 0:
        return u, 1.0
    z = (abs(u - mu) - 0.5) / math.sqrt(sigma_sq)
    if z < 0:
        z = 0.0
    p = math.erfc(z / math.sqrt(2))
    return u, min(p, 1.0)


# --- set comparison ---------------------------------------------------------

def _mean_std(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def _histogram(values: list[float], bins: int = 10) -> list[int]:
    counts = [0] * bins
    for v in values:
        idx = min(int(v * bins), bins - 1)
        counts[idx] += 1
    return counts


@dataclass
class ComparisonReport:
    label_a: str
    label_b: str
    n_a: int
    n_b: int
    summary_a: dict[str, tuple[float, float]] = field(default_factory=dict)
    summary_b: dict[str, tuple[float, float]] = field(default_factory=dict)
    u_statistic: float = 0.0
    p_value: float = 1.0
    per_level_a: list[dict] = field(default_factory=list)
    per_level_b: list[dict] = field(default_factory=list)
    histograms: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "sets": {
                self.label_a: {"n": self.n_a, "levels": self.per_level_a},
                self.label_b: {"n": self.n_b, "levels": self.per_level_b},
            },
            "summary": {
                self.label_a: {k: list(v) for k, v in self.summary_a.items()},
                self.label_b: {k: list(v) for k, v in self.summary_b.items()},
            },
            "percent_collected_test": {"U": self.u_statistic, "p": self.p_value},
            "histograms": self.histograms,
        }

    def as_table(self) -> str:
        cols = METRIC_FIELDS
        lines = ["set\t" + "\t".join(cols)]
        for label, summary in ((self.label_a, self.summary_a), (self.label_b, self.summary_b)):
            cells = [f"{summary[c][0]:.2f}±{summary[c][1]:.2f}" for c in cols]
            lines.append(label + "\t" + "\t".join(cells))
        lines.append(
            f"Mann-Whitney U (percent_collected): U={self.u_statistic:.1f} "
            f"p={self.p_value:.5f}"
        )
        return "\n".join(lines)


def compare_sets(
    set_a: list[TileGrid],
    set_b: list[TileGrid],
    label_a: str = "a",
    label_b: str = "b",
) -> ComparisonReport:
    """Evaluate both sets and report per-metric mean±std plus the U test."""
    if not set_a or not set_b:
        raise InputError("both level sets must be nonempty")
    records = []
    for grids in (set_a, set_b):
        recs = []
        for i, grid in enumerate(grids):
            try:
                recs.append(evaluate_level(grid).as_dict())
            except Exception as exc:
                raise type(exc)(f"level index {i}: {exc}") from exc
        records.append(recs)
    recs_a, recs_b = records
    report = ComparisonReport(label_a, label_b, len(set_a), len(set_b))
    report.per_level_a = recs_a
    report.per_level_b = recs_b
    for field_name in METRIC_FIELDS:
        report.summary_a[field_name] = _mean_std([r[field_name] for r in recs_a])
        report.summary_b[field_name] = _mean_std([r[field_name] for r in recs_b])
    report.u_statistic, report.p_value = mann_whitney_u(
        [r["percent_collected"] for r in recs_a],
        [r["percent_collected"] for r in recs_b],
    )
    report.histograms = {
        "empty_prop": {
            label_a: _histogram([r["empty_prop"] for r in recs_a]),
            label_b: _histogram([r["empty_prop"] for r in recs_b]),
        },
        "interesting_prop": {
            label_a: _histogram([r["interesting_prop"] for r in recs_a]),
            label_b: _histogram([r["interesting_prop"] for r in recs_b]),
        },
    }
    return report

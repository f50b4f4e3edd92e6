"""Pathfinding agent: movement model, A* search, and path synthesis.

The agent ignores enemies and cannot dig.  Solid and diggable bricks are
impassable; everything else can be occupied.  A cell below the bottom row
counts as solid ground, so the agent never falls out of the level.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .errors import SolveError, StructureError
from .paths import PathSequence
from .tiles import BRICK, GOLD, LADDER, ROPE, SOLID, SPAWN, TileGrid

Coord = tuple[int, int]

_BLOCKED = {BRICK, SOLID}


def _passable(grid: TileGrid, x: int, y: int) -> bool:
    return grid.in_bounds(x, y) and grid.get(x, y) not in _BLOCKED


def legal_moves(grid: TileGrid, state: Coord) -> list[tuple[str, Coord]]:
    """Deterministic move set from a position.

    Falling is forced: an unsupported agent has exactly one move, 'f'.
    Support means standing on brick or ladder, being on a ladder or rope,
    or being on the bottom row.
    """
    x, y = state
    here = grid.get(x, y)
    on_ladder = here == LADDER
    on_rope = here == ROPE
    below_oob = y + 1 >= grid.height
    below = None if below_oob else grid.get(x, y + 1)
    supported = below_oob or below in (BRICK, SOLID, LADDER) or on_ladder or on_rope

    if not supported:
        return [("f", (x, y + 1))]

    moves: list[tuple[str, Coord]] = []
    if _passable(grid, x - 1, y):
        moves.append(("l", (x - 1, y)))
    if _passable(grid, x + 1, y):
        moves.append(("r", (x + 1, y)))
    if on_ladder and _passable(grid, x, y - 1):
        moves.append(("u", (x, y - 1)))
    if not below_oob and _passable(grid, x, y + 1):
        if below == LADDER or on_ladder:
            moves.append(("c", (x, y + 1)))
        elif on_rope:
            moves.append(("f", (x, y + 1)))
    return moves


@dataclass
class SearchResult:
    reached: bool
    nodes_explored: int
    path: list[tuple[str, Coord]]


def astar_to_goal(grid: TileGrid, start: Coord, goal: Coord) -> SearchResult:
    """A* with Manhattan heuristic and unit step cost over legal_moves.

    nodes_explored counts expanded states (including the goal pop).
    """
    def h(c: Coord) -> int:
        return abs(c[0] - goal[0]) + abs(c[1] - goal[1])

    frontier: list[tuple[int, int, Coord]] = [(h(start), 0, start)]
    came_from: dict[Coord, tuple[Coord, str]] = {}
    g_cost = {start: 0}
    closed: set[Coord] = set()
    explored = 0
    counter = 0
    while frontier:
        _, _, current = heapq.heappop(frontier)
        if current in closed:
            continue
        closed.add(current)
        explored += 1
        if current == goal:
            path = []
            node = current
            while node != start:
                prev, action = came_from[node]
                path.append((action, node))
                node = prev
            path.reverse()
            return SearchResult(True, explored, path)
        for action, nxt in legal_moves(grid, current):
            cost = g_cost[current] + 1
            if nxt not in g_cost or cost < g_cost[nxt]:
                g_cost[nxt] = cost
                came_from[nxt] = (current, action)
                counter += 1
                heapq.heappush(frontier, (cost + h(nxt), counter, nxt))
    return SearchResult(False, explored, [])


def bfs_search(grid: TileGrid, start: Coord, goal: Coord) -> SearchResult:
    """Breadth-first reference search over the same move model."""
    from collections import deque

    queue = deque([start])
    came_from: dict[Coord, tuple[Coord, str]] = {}
    seen = {start}
    explored = 0
    while queue:
        current = queue.popleft()
        explored += 1
        if current == goal:
            path = []
            node = current
            while node != start:
                prev, action = came_from[node]
                path.append((action, node))
                node = prev
            path.reverse()
            return SearchResult(True, explored, path)
        for action, nxt in legal_moves(grid, current):
            if nxt not in seen:
                seen.add(nxt)
                came_from[nxt] = (current, action)
                queue.append(nxt)
    return SearchResult(False, explored, [])


def find_spawn(grid: TileGrid) -> Coord:
    spawns = grid.find_all(SPAWN)
    if len(spawns) != 1:
        raise StructureError(f"expected exactly one spawn, found {len(spawns)}")
    return spawns[0]


def solve_for_path(grid: TileGrid) -> PathSequence:
    """Greedy gold tour from spawn; the synthetic-corpus path extractor.

    Repeatedly runs A* from the current position to every remaining gold
    and commits to the nearest reachable one.  Fails if no gold can be
    reached at all.
    """
    start = find_spawn(grid)
    remaining = set(grid.find_all(GOLD))
    if not remaining:
        raise SolveError("level has no gold")
    current = start
    actions: list[str] = []
    collected = 0
    while remaining:
        best = None
        for gold in remaining:
            result = astar_to_goal(grid, current, gold)
            if result.reached and (best is None or len(result.path) < len(best[1].path)):
                best = (gold, result)
        if best is None:
            break
        gold, result = best
        actions.extend(a for a, _ in result.path)
        current = gold
        remaining.discard(gold)
        collected += 1
    if collected == 0:
        raise SolveError("no gold reachable from spawn")
    return PathSequence(start, "".join(actions))

import type { Cell, LevelResponse, Metrics } from "./types.js";

export const TILE_COLORS: Record<string, string> = {
  ".": "#101018",
  b: "#a0522d",
  B: "#6b6b76",
  "#": "#d4b106",
  "-": "#8fbcbb",
  G: "#ffd700",
  E: "#e05555",
  M: "#4f9dff",
};

export const TILE_GLYPHS: Record<string, string> = {
  ".": "",
  b: "▒",
  B: "█",
  "#": "≡",
  "-": "—",
  G: "●",
  E: "☠",
  M: "☺",
};

/** The exact plain-text form the server returned; what Export saves. */
export function exportVglc(level: LevelResponse): string {
  return level.vglc;
}

/** Path trace cells in visit order, reconstructed from the response. */
export function overlayCells(level: LevelResponse): Cell[] {
  const moves: Record<string, [number, number]> = {
    l: [-1, 0],
    r: [1, 0],
    u: [0, -1],
    c: [0, 1],
    f: [0, 1],
  };
  let [x, y] = level.path.start;
  const cells: Cell[] = [[x, y]];
  for (const a of level.path.actions) {
    const [dx, dy] = moves[a];
    x += dx;
    y += dy;
    cells.push([x, y]);
  }
  return cells;
}

export function metricsSummary(m: Metrics): [string, string][] {
  return [
    ["gold total", String(m.gold_total)],
    ["percent collected", `${m.percent_collected.toFixed(2)}%`],
    ["nodes per gold", m.nodes_per_gold.toFixed(1)],
    ["size", `${m.width}x${m.height}`],
    ["empty proportion", m.empty_prop.toFixed(3)],
    ["interesting proportion", m.interesting_prop.toFixed(3)],
  ];
}

export function drawLevel(
  ctx: CanvasRenderingContext2D,
  level: LevelResponse,
  cellSize: number,
): void {
  ctx.clearRect(0, 0, level.width * cellSize, level.height * cellSize);
  for (let y = 0; y < level.height; y++) {
    for (let x = 0; x < level.width; x++) {
      const tile = level.tiles[y][x];
      ctx.fillStyle = TILE_COLORS[tile] ?? "#000";
      ctx.fillRect(x * cellSize, y * cellSize, cellSize, cellSize);
      const glyph = TILE_GLYPHS[tile];
      if (glyph) {
        ctx.fillStyle = "#ffffffcc";
        ctx.font = `${cellSize * 0.7}px monospace`;
        ctx.textAlign = "center";
        ctx.textBaseline = "middle";
        ctx.fillText(glyph, (x + 0.5) * cellSize, (y + 0.5) * cellSize);
      }
    }
  }
  // path overlay, outlined in trace order
  ctx.strokeStyle = "#00e5ff";
  ctx.lineWidth = Math.max(1, cellSize / 12);
  for (const [x, y] of overlayCells(level)) {
    ctx.strokeRect(x * cellSize + 1, y * cellSize + 1, cellSize - 2, cellSize - 2);
  }
}

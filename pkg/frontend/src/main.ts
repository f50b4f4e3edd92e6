import { ApiClient } from "./api.js";
import { Controller } from "./controller.js";
import {
  clearTrace,
  deriveActions,
  emptyState,
  toggleClimb,
  tryExtendTrace,
} from "./editor.js";
import { drawLevel, exportVglc, metricsSummary } from "./render.js";
import type { Cell } from "./types.js";

const EDIT_COLS = 32;
const EDIT_ROWS = 22;
const CELL = 22;

const api = new ApiClient();
const state = emptyState();
const controller = new Controller(api, state);

const $ = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;

const editCanvas = $<HTMLCanvasElement>("editor");
const levelCanvas = $<HTMLCanvasElement>("level");
const banner = $<HTMLDivElement>("banner");
const actionsBox = $<HTMLDivElement>("actions");
const metricsBox = $<HTMLTableElement>("metrics");
const exportBox = $<HTMLTextAreaElement>("export");
const seedBox = $<HTMLSpanElement>("seed");

editCanvas.width = EDIT_COLS * CELL;
editCanvas.height = EDIT_ROWS * CELL;

function showBanner(message: string, isError = true) {
  banner.textContent = message;
  banner.className = message ? (isError ? "error" : "info") : "";
}

function drawEditor() {
  const ctx = editCanvas.getContext("2d")!;
  ctx.clearRect(0, 0, editCanvas.width, editCanvas.height);
  ctx.strokeStyle = "#333";
  for (let x = 0; x <= EDIT_COLS; x++) {
    ctx.beginPath();
    ctx.moveTo(x * CELL, 0);
    ctx.lineTo(x * CELL, EDIT_ROWS * CELL);
    ctx.stroke();
  }
  for (let y = 0; y <= EDIT_ROWS; y++) {
    ctx.beginPath();
    ctx.moveTo(0, y * CELL);
    ctx.lineTo(EDIT_COLS * CELL, y * CELL);
    ctx.stroke();
  }
  state.trace.forEach(([x, y], i) => {
    ctx.fillStyle = i === 0 ? "#4f9dff" : "#00e5ff88";
    ctx.fillRect(x * CELL + 2, y * CELL + 2, CELL - 4, CELL - 4);
  });
  actionsBox.textContent =
    state.trace.length > 1
      ? deriveActions(state.trace, state.climbToggles)
      : "(draw a path: click-drag on the grid)";
}

function renderResult() {
  const level = state.lastLevel;
  if (!level) return;
  const size = Math.min(CELL, Math.floor(704 / level.width));
  levelCanvas.width = level.width * size;
  levelCanvas.height = level.height * size;
  drawLevel(levelCanvas.getContext("2d")!, level, size);
  seedBox.textContent = String(level.seed);
  exportBox.value = exportVglc(level);
  metricsBox.innerHTML = metricsSummary(level.metrics)
    .map(([k, v]) => `<tr><td>${k}</td><td>${v}</td></tr>`)
    .join("");
}

let dragging = false;

function cellAt(ev: MouseEvent): Cell {
  const rect = editCanvas.getBoundingClientRect();
  return [
    Math.floor((ev.clientX - rect.left) / CELL),
    Math.floor((ev.clientY - rect.top) / CELL),
  ];
}

editCanvas.addEventListener("mousedown", (ev) => {
  dragging = true;
  if (!tryStep(cellAt(ev))) showBanner("steps must be adjacent cells");
});
editCanvas.addEventListener("mousemove", (ev) => {
  if (dragging) tryStep(cellAt(ev));
});
window.addEventListener("mouseup", () => (dragging = false));

function tryStep(cell: Cell): boolean {
  const ok = tryExtend(cell);
  drawEditor();
  return ok;
}

function tryExtend(cell: Cell): boolean {
  if (cell[0] < 0 || cell[0] >= EDIT_COLS || cell[1] < 0 || cell[1] >= EDIT_ROWS) {
    return false;
  }
  const ok = tryExtendTrace(state, cell);
  if (!ok) showBanner("steps must be adjacent cells");
  else showBanner("");
  return ok;
}

$<HTMLButtonElement>("toggle-last").addEventListener("click", () => {
  toggleClimb(state, state.trace.length - 2);
  drawEditor();
});

$<HTMLButtonElement>("clear").addEventListener("click", () => {
  clearTrace(state);
  drawEditor();
});

async function runGenerate(keepPath: boolean) {
  if (controller.busy) return;
  if (keepPath && state.trace.length < 2) {
    showBanner("draw a path first, or use Sample Path");
    return;
  }
  showBanner("generating...", false);
  try {
    await controller.regenerate(keepPath);
    showBanner("");
    renderResult();
  } catch (err) {
    showBanner(`generation failed: ${(err as Error).message} — retry?`);
  }
}

$<HTMLButtonElement>("generate").addEventListener("click", () => runGenerate(true));
$<HTMLButtonElement>("sample").addEventListener("click", () => runGenerate(false));
$<HTMLButtonElement>("download").addEventListener("click", () => {
  if (!state.lastLevel) return;
  const blob = new Blob([exportVglc(state.lastLevel)], { type: "text/plain" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = `level_seed_${state.lastLevel.seed}.txt`;
  a.click();
  URL.revokeObjectURL(a.href);
});

api
  .health()
  .then((h) => {
    if (!h.chain_loaded) showBanner("server is up but models are not loaded");
  })
  .catch(() => showBanner("server unreachable — start it with `lodegen serve`"));

drawEditor();

import type { Cell, LevelResponse } from "./types.js";

export interface EditorState {
  trace: Cell[];
  /** Per-step override: a downward step is 'f' unless toggled to 'c'. */
  climbToggles: boolean[];
  lastLevel: LevelResponse | null;
  lastSeed: number | null;
}

export function emptyState(): EditorState {
  return { trace: [], climbToggles: [], lastLevel: null, lastSeed: null };
}

export class NonAdjacentStep extends Error {}

function stepAction(from: Cell, to: Cell, climb: boolean): string {
  const dx = to[0] - from[0];
  const dy = to[1] - from[1];
  if (dx === -1 && dy === 0) return "l";
  if (dx === 1 && dy === 0) return "r";
  if (dx === 0 && dy === -1) return "u";
  if (dx === 0 && dy === 1) return climb ? "c" : "f";
  throw new NonAdjacentStep(`(${from}) -> (${to}) is not a unit step`);
}

/** Derived action string; always trace.length - 1 characters. */
export function deriveActions(trace: Cell[], climbToggles: boolean[] = []): string {
  let out = "";
  for (let i = 1; i < trace.length; i++) {
    out += stepAction(trace[i - 1], trace[i], climbToggles[i - 1] ?? false);
  }
  return out;
}

/** Append a cell if it is a unit step from the trace end (or the first cell). */
export function tryExtendTrace(state: EditorState, cell: Cell): boolean {
  if (state.trace.length === 0) {
    state.trace.push(cell);
    return true;
  }
  const last = state.trace[state.trace.length - 1];
  if (last[0] === cell[0] && last[1] === cell[1]) return true; // drag in place
  try {
    stepAction(last, cell, false);
  } catch {
    return false;
  }
  state.trace.push(cell);
  state.climbToggles.push(false);
  return true;
}

/** Flip the c/f choice of one downward step; ignored for other steps. */
export function toggleClimb(state: EditorState, stepIndex: number): void {
  const from = state.trace[stepIndex];
  const to = state.trace[stepIndex + 1];
  if (!from || !to) return;
  if (to[1] - from[1] === 1 && to[0] === from[0]) {
    state.climbToggles[stepIndex] = !state.climbToggles[stepIndex];
  }
}

export function clearTrace(state: EditorState): void {
  state.trace = [];
  state.climbToggles = [];
}

import type { LevelResponse } from "../src/types.js";

/** A tiny but fully-formed level document as the server would return it. */
export function makeLevel(overrides: Partial<LevelResponse> = {}): LevelResponse {
  const tiles = ["....", ".G..", "BBBB"];
  return {
    width: 4,
    height: 3,
    tiles,
    actions: ["rr..", "....", "...."],
    seed: 42,
    vglc: tiles.join("\n") + "\n",
    path: { start: [0, 0], actions: "rr" },
    metrics: {
      gold_total: 1,
      percent_collected: 100.0,
      total_nodes_explored: 5,
      nodes_per_gold: 5.0,
      width: 4,
      height: 3,
      empty_prop: 0.5833333,
      interesting_prop: 0.4166667,
    },
    ...overrides,
  };
}

type FetchFn = (input: string, init?: RequestInit) => Promise<Response>;

/** Fetch stub that replays queued JSON bodies and records every request. */
export function queuedFetch(
  bodies: unknown[],
  calls: { url: string; init?: RequestInit }[],
): FetchFn {
  let i = 0;
  return async (url, init) => {
    calls.push({ url, init });
    const body = bodies[Math.min(i++, bodies.length - 1)];
    return new Response(JSON.stringify(body), {
      status: 200,
      headers: { "Content-Type": "application/json" },
    });
  };
}

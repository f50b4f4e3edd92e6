export type Cell = [number, number]; // [column, row], row 0 at the top

export interface Metrics {
  gold_total: number;
  percent_collected: number;
  total_nodes_explored: number;
  nodes_per_gold: number;
  width: number;
  height: number;
  empty_prop: number;
  interesting_prop: number;
}

export interface LevelResponse {
  width: number;
  height: number;
  tiles: string[];
  actions: string[];
  seed: number;
  vglc: string;
  path: { start: [number, number]; actions: string };
  metrics: Metrics;
}

export interface GenerateRequest {
  actions?: string;
  path_length?: number;
  seed?: number;
}

export const ACTION_CHARS = "lrucf";

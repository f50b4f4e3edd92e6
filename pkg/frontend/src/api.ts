import type { GenerateRequest, LevelResponse, Metrics } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

type FetchFn = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin JSON client for the four server endpoints. */
export class ApiClient {
  constructor(
    private fetchFn: FetchFn = (...args) => fetch(...args),
    private base = "",
  ) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.base + path, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        detail = (await resp.json()).detail ?? detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  generate(req: GenerateRequest): Promise<LevelResponse> {
    return this.json<LevelResponse>("/api/generate", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
  }

  samplePath(length?: number): Promise<{ actions: string; seed: number }> {
    const qs = length === undefined ? "" : `?length=${length}`;
    return this.json(`/api/path/sample${qs}`);
  }

  evaluate(tiles: string[]): Promise<Metrics> {
    return this.json<Metrics>("/api/evaluate", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ tiles }),
    });
  }

  health(): Promise<{ status: string; lstm_loaded: boolean; chain_loaded: boolean }> {
    return this.json("/api/health");
  }
}

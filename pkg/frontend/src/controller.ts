import { ApiClient } from "./api.js";
import { deriveActions, EditorState } from "./editor.js";
import type { LevelResponse } from "./types.js";

/**
 * Drives the generate/inspect loop.  The state is only committed after a
 * successful response, so a network failure leaves everything untouched.
 * One request is in flight at a time; extra calls are rejected.
 */
export class Controller {
  private inFlight = false;

  constructor(
    private api: ApiClient,
    public state: EditorState,
  ) {}

  get busy(): boolean {
    return this.inFlight;
  }

  /**
   * keepPath=true resends the drawn path (new server-drawn seed, same
   * overlay); keepPath=false asks for a freshly sampled path.
   */
  async regenerate(keepPath: boolean, pathLength = 103): Promise<LevelResponse> {
    if (this.inFlight) throw new Error("a generation request is already running");
    this.inFlight = true;
    try {
      const req = keepPath
        ? { actions: deriveActions(this.state.trace, this.state.climbToggles) }
        : { path_length: pathLength };
      const level = await this.api.generate(req);
      this.state.lastLevel = level;
      this.state.lastSeed = level.seed;
      return level;
    } finally {
      this.inFlight = false;
    }
  }
}

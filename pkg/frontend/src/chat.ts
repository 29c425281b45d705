/** Chat pane controller: mode selection, message submission, error banners.
 *
 * Concurrent submissions for the same session are deduplicated: while one
 * request is in flight, further submits are rejected locally instead of
 * double-posting. Failed turns stay visible with their error banner.
 */

import { ApiError, GatewayClient } from "./api.js";
import { buildSourceCards, SourceCard } from "./sourceReader.js";
import type { ChatMode, ChatTurn } from "./types.js";
import { CHAT_MODES } from "./types.js";

export interface RenderedTurn {
  prompt: string;
  mode: ChatMode;
  answer: string | null;
  sourceCards: SourceCard[];
  error: { code: string; message: string } | null;
}

export class ChatController {
  selectedMode: ChatMode = "quick";
  readonly turns: RenderedTurn[] = [];
  private inFlight = false;

  constructor(
    private client: GatewayClient,
    private courseId: string,
    private sessionId: string,
  ) {}

  selectMode(mode: ChatMode): void {
    if (!CHAT_MODES.includes(mode)) {
      throw new Error(`unknown mode ${mode}`);
    }
    this.selectedMode = mode;
  }

  get busy(): boolean {
    return this.inFlight;
  }

  async submit(prompt: string): Promise<RenderedTurn> {
    if (!prompt.trim()) {
      throw new Error("prompt must not be empty");
    }
    if (this.inFlight) {
      throw new Error("a message is already in flight for this session");
    }
    this.inFlight = true;
    try {
      const turn: ChatTurn = await this.client.chat(
        this.courseId,
        this.sessionId,
        prompt,
        this.selectedMode,
      );
      const rendered: RenderedTurn = {
        prompt,
        mode: this.selectedMode,
        answer: turn.answer,
        sourceCards: buildSourceCards(turn.citations),
        error: null,
      };
      this.turns.push(rendered);
      return rendered;
    } catch (err) {
      const rendered: RenderedTurn = {
        prompt,
        mode: this.selectedMode,
        answer: null,
        sourceCards: [],
        error:
          err instanceof ApiError
            ? { code: err.body.code, message: err.body.message }
            : { code: "network_error", message: String(err) },
      };
      this.turns.push(rendered);
      return rendered;
    } finally {
      this.inFlight = false;
    }
  }
}

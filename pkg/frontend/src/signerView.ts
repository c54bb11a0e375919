/** Signer session controller: one chain per session, frames at a fixed cadence.
 *
 * The words buffer auto-commits every segment window (2 s by default), empty
 * buffers included, so silent spans still produce signed frames. Commits are
 * strictly serialized: a tick that fires mid-request queues behind it, and
 * the frame index the service returns is asserted to be the next in line.
 * A failed request pauses the cadence until the operator retries.
 */

import type { SignApi } from "./api.js";
import type { FrameInfo } from "./types.js";

export interface SignerHooks {
  showFrame(frame: FrameInfo): void;
  showError(message: string): void;
  clearError(): void;
  sessionChanged(running: boolean, closed: boolean): void;
  windowProgress(fraction: number): void;
}

export class SignerController {
  buffer = "";
  paused = false;
  private sessionId: string | null = null;
  private closed = false;
  private lastIndex = -1;
  private windowStart = 0;
  private inflight: Promise<void> = Promise.resolve();

  constructor(
    private api: SignApi,
    private hooks: SignerHooks,
    private segMs = 2000,
  ) {}

  get running(): boolean {
    return this.sessionId !== null && !this.closed;
  }

  async start(keyId: string, now: number = Date.now()): Promise<void> {
    const { session_id, frame0 } = await this.api.openSignSession(keyId);
    this.sessionId = session_id;
    this.closed = false;
    this.paused = false;
    this.lastIndex = 0;
    this.buffer = "";
    this.windowStart = now;
    this.hooks.clearError();
    this.hooks.showFrame(frame0);
    this.hooks.sessionChanged(true, false);
  }

  /** Drive from a timer; commits the buffer when the window elapses. */
  tick(now: number = Date.now()): void {
    if (!this.running || this.paused) return;
    const elapsed = now - this.windowStart;
    this.hooks.windowProgress(Math.min(elapsed / this.segMs, 1));
    if (elapsed >= this.segMs) {
      this.windowStart = now;
      void this.commit();
    }
  }

  /** Send the current buffer as the next segment; serialized with others. */
  commit(): Promise<void> {
    const words = this.buffer;
    this.buffer = "";
    this.inflight = this.inflight.then(() => this.sendSegment(words));
    return this.inflight;
  }

  private async sendSegment(words: string): Promise<void> {
    if (!this.sessionId || this.closed || this.paused) return;
    try {
      const { frame } = await this.api.submitSegment(this.sessionId, words);
      if (frame.index !== this.lastIndex + 1) {
        throw new Error(`frame order broken: got ${frame.index} after ${this.lastIndex}`);
      }
      this.lastIndex = frame.index;
      this.hooks.clearError();
      this.hooks.showFrame(frame);
    } catch (err) {
      this.paused = true; // cadence stops; the buffer for this window is kept
      this.buffer = this.buffer ? `${words} ${this.buffer}` : words;
      this.hooks.showError(String(err instanceof Error ? err.message : err));
      this.hooks.sessionChanged(this.running, this.closed);
    }
  }

  /** Resume the cadence after an error, retrying the kept buffer first. */
  resume(now: number = Date.now()): Promise<void> {
    if (!this.paused) return Promise.resolve();
    this.paused = false;
    this.windowStart = now;
    this.hooks.sessionChanged(this.running, this.closed);
    return this.commit();
  }

  async close(): Promise<void> {
    if (!this.sessionId || this.closed) return;
    await this.inflight;
    const { terminal_frame } = await this.api.closeSignSession(this.sessionId);
    this.closed = true;
    this.hooks.showFrame(terminal_frame);
    this.hooks.sessionChanged(false, true);
  }
}

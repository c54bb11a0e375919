/** Verifier console controller: steps a loaded manifest through the service.
 *
 * Frames go up strictly in index order and never resubmit. A pending trust
 * question blocks the run until answer() is called (the modal in the DOM
 * layer enforces the same thing on the operator). The final verdict is
 * passed through verbatim with its display tone.
 */

import type { VerifyApi } from "./api.js";
import { ManifestError, parseManifest } from "./manifest.js";
import type { ManifestEntry, QuestionInfo, VerdictInfo, VerifyResponse } from "./types.js";
import { verdictTone } from "./types.js";

export interface VerifierHooks {
  appendLog(line: string): void;
  frameChecked(done: number, total: number): void;
  showQuestion(question: QuestionInfo): void;
  hideQuestion(): void;
  showVerdict(verdict: VerdictInfo, tone: "green" | "amber" | "red"): void;
  showError(message: string): void;
}

export class VerifierController {
  entries: ManifestEntry[] = [];
  submittedIndices: number[] = [];
  verdict: VerdictInfo | null = null;
  private sessionId: string | null = null;
  private pendingAnswer: ((accept: boolean) => void) | null = null;

  constructor(private api: VerifyApi, private hooks: VerifierHooks) {}

  get questionPending(): boolean {
    return this.pendingAnswer !== null;
  }

  loadManifest(text: string): number {
    try {
      this.entries = parseManifest(text);
    } catch (err) {
      if (err instanceof ManifestError) {
        this.hooks.showError(`malformed manifest at frame ${err.frameIndex}: ${err.message}`);
      } else {
        this.hooks.showError(String(err));
      }
      this.entries = [];
      return 0;
    }
    return this.entries.length;
  }

  /** Answer the currently pending trust question. */
  answer(accept: boolean): void {
    if (!this.pendingAnswer) return;
    const resolve = this.pendingAnswer;
    this.pendingAnswer = null;
    this.hooks.hideQuestion();
    resolve(accept);
  }

  private waitForAnswer(question: QuestionInfo): Promise<boolean> {
    this.hooks.showQuestion(question);
    return new Promise((resolve) => {
      this.pendingAnswer = resolve;
    });
  }

  private async drainQuestions(response: VerifyResponse): Promise<VerifyResponse> {
    let current = response;
    while (current.status === "question_pending" && current.question) {
      const accept = await this.waitForAnswer(current.question);
      current = await this.api.answerQuestion(this.sessionId!, accept);
      this.logEvents(current);
    }
    return current;
  }

  private logEvents(response: VerifyResponse): void {
    for (const line of response.events ?? []) {
      this.hooks.appendLog(line);
    }
  }

  private conclude(verdict: VerdictInfo): void {
    this.verdict = verdict;
    this.hooks.showVerdict(verdict, verdictTone(verdict.code));
  }

  async run(): Promise<VerdictInfo | null> {
    if (this.entries.length === 0) {
      this.hooks.showError("no manifest loaded");
      return null;
    }
    this.verdict = null;
    this.submittedIndices = [];
    try {
      const { session_id } = await this.api.openVerifySession();
      this.sessionId = session_id;
      for (const entry of this.entries) {
        this.submittedIndices.push(entry.index);
        let response = await this.api.submitFrame(session_id, {
          index: entry.index,
          caption: entry.caption,
          payload_text: entry.payload_text,
        });
        this.logEvents(response);
        response = await this.drainQuestions(response);
        this.hooks.frameChecked(this.submittedIndices.length, this.entries.length);
        if (response.status === "done" && response.verdict) {
          this.conclude(response.verdict);
          return this.verdict;
        }
      }
      const final = await this.api.finishVerify(session_id);
      this.logEvents(final);
      if (final.verdict) {
        this.conclude(final.verdict);
      }
      return this.verdict;
    } catch (err) {
      this.hooks.showError(String(err instanceof Error ? err.message : err));
      return null;
    }
  }
}

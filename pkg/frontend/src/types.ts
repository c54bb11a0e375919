/** Shared wire types mirroring the local service's JSON API. */

export interface FrameInfo {
  index: number;
  payload_text: string;
  caption: string;
  png_b64: string;
}

export interface VerdictInfo {
  code: string;
  message: string;
  frame_index?: number;
  revoked_at?: number;
}

export interface QuestionInfo {
  name: string;
  kind: "first-trust" | "cert-changed";
  text: string;
}

export type VerifyStatus = "ok" | "done" | "question_pending";

export interface VerifyResponse {
  status: VerifyStatus;
  verdict?: VerdictInfo;
  question?: QuestionInfo;
  events: string[];
}

export interface ManifestEntry {
  index: number;
  caption: string;
  payload_text?: string;
  png_file?: string;
}

export type VerdictTone = "green" | "amber" | "red";

export function verdictTone(code: string): VerdictTone {
  if (code === "Verified") return "green";
  if (code.startsWith("Fake")) return "red";
  return "amber"; // PossiblyFake* and Unterminated
}

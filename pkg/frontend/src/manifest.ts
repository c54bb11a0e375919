/** Parsing for uploaded stream.jsonl manifests. */

import type { ManifestEntry } from "./types.js";

export class ManifestError extends Error {
  constructor(public frameIndex: number, message: string) {
    super(message);
    this.name = "ManifestError";
  }
}

export function parseManifest(text: string): ManifestEntry[] {
  const entries: ManifestEntry[] = [];
  const lines = text.split("\n").filter((line) => line.trim().length > 0);
  lines.forEach((line, lineNo) => {
    let record: unknown;
    try {
      record = JSON.parse(line);
    } catch (err) {
      throw new ManifestError(lineNo, `line ${lineNo + 1} is not JSON: ${String(err)}`);
    }
    const obj = record as Record<string, unknown>;
    if (typeof obj.index !== "number" || typeof obj.caption !== "string") {
      throw new ManifestError(lineNo, `line ${lineNo + 1}: index and caption are required`);
    }
    if (typeof obj.payload_text !== "string") {
      // the browser cannot follow png_file references from a single upload
      throw new ManifestError(obj.index, `frame ${obj.index}: payload_text is missing`);
    }
    entries.push({
      index: obj.index,
      caption: obj.caption,
      payload_text: obj.payload_text,
    });
  });
  entries.forEach((entry, position) => {
    if (entry.index !== position) {
      throw new ManifestError(position, `frame indices must run 0..n, found ${entry.index}`);
    }
  });
  return entries;
}

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

const root = join(dirname(fileURLToPath(import.meta.url)), "..");

describe("signing-scope warning", () => {
  const html = readFileSync(join(root, "index.html"), "utf-8");

  it("is present on the page", () => {
    expect(html).toMatch(/only the spoken words are being signed/);
  });

  it("sits outside both views so it stays visible in each", () => {
    const warningAt = html.indexOf('id="signing-scope-warning"');
    const signViewAt = html.indexOf('id="view-sign"');
    const verifyViewAt = html.indexOf('id="view-verify"');
    expect(warningAt).toBeGreaterThan(-1);
    expect(warningAt).toBeLessThan(signViewAt);
    expect(warningAt).toBeLessThan(verifyViewAt);
    // and the warning element itself is never hidden
    const warningTag = html.slice(html.lastIndexOf("<", warningAt), html.indexOf(">", warningAt));
    expect(warningTag).not.toContain("hidden");
  });
});

/** DOM wiring for the signer and verifier views. */

import { ServiceClient } from "./api.js";
import { SignerController } from "./signerView.js";
import { VerifierController } from "./verifierView.js";
import type { FrameInfo, QuestionInfo, VerdictInfo } from "./types.js";

const api = new ServiceClient("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

// ---------------------------------------------------------------------------
// Signer view
// ---------------------------------------------------------------------------

function wireSigner(): void {
  const frameImg = el<HTMLImageElement>("sign-qr");
  const captionEl = el<HTMLDivElement>("sign-caption");
  const indexEl = el<HTMLSpanElement>("sign-index");
  const errorEl = el<HTMLDivElement>("sign-error");
  const wordsInput = el<HTMLInputElement>("sign-words");
  const keyInput = el<HTMLInputElement>("sign-key-id");
  const startBtn = el<HTMLButtonElement>("sign-start");
  const commitBtn = el<HTMLButtonElement>("sign-commit");
  const closeBtn = el<HTMLButtonElement>("sign-close");
  const resumeBtn = el<HTMLButtonElement>("sign-resume");
  const meter = el<HTMLDivElement>("sign-meter");

  const controller = new SignerController(api, {
    showFrame(frame: FrameInfo) {
      frameImg.src = `data:image/png;base64,${frame.png_b64}`;
      captionEl.textContent = frame.caption;
      indexEl.textContent = String(frame.index);
    },
    showError(message: string) {
      errorEl.textContent = message;
      errorEl.hidden = false;
      resumeBtn.hidden = false;
    },
    clearError() {
      errorEl.hidden = true;
      resumeBtn.hidden = true;
    },
    sessionChanged(running: boolean, closed: boolean) {
      wordsInput.disabled = !running;
      commitBtn.disabled = !running;
      closeBtn.disabled = !running;
      startBtn.disabled = running;
      if (closed) captionEl.textContent = "";
    },
    windowProgress(fraction: number) {
      meter.style.width = `${Math.round(fraction * 100)}%`;
    },
  });

  wordsInput.addEventListener("input", () => {
    controller.buffer = wordsInput.value;
  });
  const syncBuffer = () => {
    wordsInput.value = controller.buffer;
  };
  startBtn.addEventListener("click", () => {
    void controller.start(keyInput.value || "default").catch((err) => {
      errorEl.textContent = String(err instanceof Error ? err.message : err);
      errorEl.hidden = false;
    });
  });
  commitBtn.addEventListener("click", () => {
    void controller.commit().then(syncBuffer);
  });
  closeBtn.addEventListener("click", () => {
    void controller.close();
  });
  resumeBtn.addEventListener("click", () => {
    void controller.resume().then(syncBuffer);
  });
  setInterval(() => {
    controller.tick();
    if (!controller.paused) syncBuffer();
  }, 100);
}

// ---------------------------------------------------------------------------
// Verifier console
// ---------------------------------------------------------------------------

function wireVerifier(): void {
  const fileInput = el<HTMLInputElement>("verify-file");
  const runBtn = el<HTMLButtonElement>("verify-run");
  const logEl = el<HTMLUListElement>("verify-log");
  const banner = el<HTMLDivElement>("verify-banner");
  const errorEl = el<HTMLDivElement>("verify-error");
  const progressEl = el<HTMLSpanElement>("verify-progress");
  const modal = el<HTMLDivElement>("trust-modal");
  const modalText = el<HTMLParagraphElement>("trust-question");
  const acceptBtn = el<HTMLButtonElement>("trust-accept");
  const declineBtn = el<HTMLButtonElement>("trust-decline");

  const controller = new VerifierController(api, {
    appendLog(line: string) {
      const item = document.createElement("li");
      item.textContent = line;
      logEl.appendChild(item);
    },
    frameChecked(done: number, total: number) {
      progressEl.textContent = `${done} / ${total} frames`;
    },
    showQuestion(question: QuestionInfo) {
      modalText.textContent = question.text;
      modal.hidden = false;
    },
    hideQuestion() {
      modal.hidden = true;
    },
    showVerdict(verdict: VerdictInfo, tone) {
      banner.textContent = verdict.message;
      banner.className = `banner banner-${tone}`;
      banner.hidden = false;
    },
    showError(message: string) {
      errorEl.textContent = message;
      errorEl.hidden = false;
    },
  });

  fileInput.addEventListener("change", () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    void file.text().then((text) => {
      errorEl.hidden = true;
      banner.hidden = true;
      logEl.replaceChildren();
      const frames = controller.loadManifest(text);
      runBtn.disabled = frames === 0;
      progressEl.textContent = frames ? `0 / ${frames} frames` : "";
    });
  });
  runBtn.addEventListener("click", () => {
    runBtn.disabled = true;
    void controller.run().finally(() => {
      runBtn.disabled = false;
    });
  });
  acceptBtn.addEventListener("click", () => controller.answer(true));
  declineBtn.addEventListener("click", () => controller.answer(false));
}

// ---------------------------------------------------------------------------

function wireTabs(): void {
  const signTab = el<HTMLButtonElement>("tab-sign");
  const verifyTab = el<HTMLButtonElement>("tab-verify");
  const signView = el<HTMLElement>("view-sign");
  const verifyView = el<HTMLElement>("view-verify");
  const activate = (view: "sign" | "verify") => {
    signView.hidden = view !== "sign";
    verifyView.hidden = view !== "verify";
    signTab.classList.toggle("active", view === "sign");
    verifyTab.classList.toggle("active", view === "verify");
  };
  signTab.addEventListener("click", () => activate("sign"));
  verifyTab.addEventListener("click", () => activate("verify"));
  activate("sign");
}

document.addEventListener("DOMContentLoaded", () => {
  wireTabs();
  wireSigner();
  wireVerifier();
  void api.health().catch(() => {
    const status = document.getElementById("service-status");
    if (status) {
      status.textContent = "service unreachable — start it with: wordsig serve";
      status.classList.add("error");
    }
  });
});

/** Typed client for the local session service. */

import type { FrameInfo, VerifyResponse } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

/** The slice of the API the signer view needs. */
export interface SignApi {
  openSignSession(keyId: string): Promise<{ session_id: string; frame0: FrameInfo }>;
  submitSegment(sessionId: string, words: string): Promise<{ frame: FrameInfo }>;
  closeSignSession(sessionId: string): Promise<{ terminal_frame: FrameInfo }>;
}

/** The slice of the API the verifier console needs. */
export interface VerifyApi {
  openVerifySession(trustStore?: string): Promise<{ session_id: string }>;
  submitFrame(
    sessionId: string,
    frame: { index: number; caption: string; payload_text?: string; png_b64?: string },
  ): Promise<VerifyResponse>;
  answerQuestion(sessionId: string, accept: boolean): Promise<VerifyResponse>;
  finishVerify(sessionId: string): Promise<VerifyResponse>;
}

type FetchLike = typeof fetch;

export class ServiceClient implements SignApi, VerifyApi {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    let res: Response;
    try {
      res = await this.fetchFn(`${this.baseUrl}${path}`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body ?? {}),
      });
    } catch (err) {
      throw new ApiError(0, `service unreachable: ${String(err)}`);
    }
    let payload: unknown = null;
    try {
      payload = await res.json();
    } catch {
      // non-JSON error bodies fall through to the status check
    }
    if (!res.ok) {
      const detail =
        payload && typeof payload === "object" && "error" in payload
          ? String((payload as { error: unknown }).error)
          : res.statusText;
      throw new ApiError(res.status, detail);
    }
    return payload as T;
  }

  openSignSession(keyId: string): Promise<{ session_id: string; frame0: FrameInfo }> {
    return this.post("/v1/sign/sessions", { key_id: keyId });
  }

  submitSegment(sessionId: string, words: string): Promise<{ frame: FrameInfo }> {
    return this.post(`/v1/sign/sessions/${sessionId}/segments`, { words });
  }

  closeSignSession(sessionId: string): Promise<{ terminal_frame: FrameInfo }> {
    return this.post(`/v1/sign/sessions/${sessionId}/close`, {});
  }

  openVerifySession(trustStore?: string): Promise<{ session_id: string }> {
    return this.post("/v1/verify/sessions", trustStore ? { trust_store: trustStore } : {});
  }

  submitFrame(
    sessionId: string,
    frame: { index: number; caption: string; payload_text?: string; png_b64?: string },
  ): Promise<VerifyResponse> {
    return this.post(`/v1/verify/sessions/${sessionId}/frames`, frame);
  }

  answerQuestion(sessionId: string, accept: boolean): Promise<VerifyResponse> {
    return this.post(`/v1/verify/sessions/${sessionId}/answer`, { accept });
  }

  finishVerify(sessionId: string): Promise<VerifyResponse> {
    return this.post(`/v1/verify/sessions/${sessionId}/finish`, {});
  }

  async health(): Promise<{ status: string; keys: string[] }> {
    const res = await this.fetchFn(`${this.baseUrl}/v1/health`);
    if (!res.ok) throw new ApiError(res.status, "health check failed");
    return (await res.json()) as { status: string; keys: string[] };
  }
}

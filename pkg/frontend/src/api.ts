// Thin HTTP client for the sessions service. `fetch` is injectable so the
// tests can script responses; no command is ever retried silently.

import type { FinalReport, SessionHandle, SessionStats } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface ConfigDocument {
  session: { phi_deg: number | string; seed: number; visibility?: number; eta?: number };
  profile: { alice: string; bob: string };
  stop: { policy: "fixed"; count: number };
}

export class ServiceError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

export class SessionApi {
  constructor(
    private readonly base: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async call<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.base}${path}`, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        detail = (await response.json()).detail ?? detail;
      } catch {
        // keep the status text
      }
      throw new ServiceError(detail, response.status);
    }
    return (await response.json()) as T;
  }

  createSession(config: ConfigDocument): Promise<SessionHandle> {
    return this.call("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
  }

  flip(sessionId: string, count = 1): Promise<{ stats: SessionStats }> {
    return this.call(`/sessions/${sessionId}/flips?count=${count}&records=none`, {
      method: "POST",
    });
  }

  stop(sessionId: string, reason: "stopped" | "accused"): Promise<FinalReport> {
    return this.call(`/sessions/${sessionId}/stop`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ reason }),
    });
  }

  stats(sessionId: string): Promise<SessionStats> {
    return this.call(`/sessions/${sessionId}/stats`);
  }

  streamUrl(sessionId: string): string {
    return `${this.base}/sessions/${sessionId}/stream`;
  }
}

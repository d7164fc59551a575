/** Thin typed client for the gateway HTTP API. */

import type { GatewaySnapshot, SessionEvent } from "./types.js";

export class GatewayError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "GatewayError";
  }
}

export class GatewayClient {
  constructor(readonly baseUrl: string = "") {}

  eventsUrl(): string {
    return `${this.baseUrl}/api/v1/events`;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(`${this.baseUrl}${path}`, init);
    const body = (await resp.json()) as T & { error?: string };
    if (!resp.ok) {
      throw new GatewayError(resp.status, body?.error ?? `HTTP ${resp.status}`);
    }
    return body;
  }

  getState(): Promise<GatewaySnapshot> {
    return this.request("/api/v1/state");
  }

  submitPrompt(text: string): Promise<SessionEvent[]> {
    return this.request("/api/v1/prompt", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
  }

  engageEstop(): Promise<SessionEvent> {
    return this.request("/api/v1/estop", { method: "POST" });
  }

  resetEstop(): Promise<SessionEvent> {
    return this.request("/api/v1/reset", { method: "POST" });
  }
}

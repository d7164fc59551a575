/** Server-sent-events client over fetch streaming, with reconnect backoff. */

import type { ConnectionStatus } from "./types.js";

/** Incremental parser for an SSE byte stream; returns one string per event. */
export class SseParser {
  private buffer = "";

  feed(chunk: string): string[] {
    this.buffer += chunk.replace(/\r\n/g, "\n");
    const events: string[] = [];
    let idx: number;
    while ((idx = this.buffer.indexOf("\n\n")) >= 0) {
      const raw = this.buffer.slice(0, idx);
      this.buffer = this.buffer.slice(idx + 2);
      const data = raw
        .split("\n")
        .filter((line) => line.startsWith("data:"))
        .map((line) => line.slice(5).replace(/^ /, ""))
        .join("\n");
      if (data) events.push(data); // comment-only frames (keepalives) are dropped
    }
    return events;
  }
}

export interface EventStreamHandle {
  close(): void;
}

export interface EventStreamOptions {
  /** Delay before reconnecting after a drop; default 1000 ms. */
  retryMs?: number;
}

/**
 * Opens the stream and keeps it open: on any error or EOF it reports
 * "disconnected" and retries until close() is called.
 */
export function openEventStream(
  url: string,
  onData: (data: string) => void,
  onStatus: (status: ConnectionStatus) => void,
  options: EventStreamOptions = {},
): EventStreamHandle {
  const retryMs = options.retryMs ?? 1000;
  let closed = false;
  let controller: AbortController | null = null;

  const loop = async (): Promise<void> => {
    while (!closed) {
      onStatus("connecting");
      controller = new AbortController();
      try {
        const resp = await fetch(url, {
          signal: controller.signal,
          headers: { Accept: "text/event-stream" },
        });
        if (!resp.ok || !resp.body) throw new Error(`HTTP ${resp.status}`);
        onStatus("connected");
        const reader = resp.body.getReader();
        const decoder = new TextDecoder();
        const parser = new SseParser();
        for (;;) {
          const { done, value } = await reader.read();
          if (done) break;
          for (const data of parser.feed(decoder.decode(value, { stream: true }))) {
            onData(data);
          }
        }
      } catch {
        // connection failure or abort; status handled below
      }
      if (closed) break;
      onStatus("disconnected");
      await new Promise((resolve) => setTimeout(resolve, retryMs));
    }
  };
  void loop();

  return {
    close() {
      closed = true;
      controller?.abort();
    },
  };
}

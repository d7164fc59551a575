/** Wires the store, gateway client, event stream, and DOM together. */

import { GatewayClient, GatewayError } from "./api.js";
import { openEventStream, type EventStreamHandle } from "./sse.js";
import { ConsoleStore } from "./state.js";
import type { SessionEvent } from "./types.js";
import { buildConsole, render, type ConsoleDom } from "./views.js";

export interface BootstrapOptions {
  /** Reconnect delay for the event stream (ms). */
  retryMs?: number;
}

export class ConsoleApp {
  readonly store = new ConsoleStore();
  readonly client: GatewayClient;
  readonly dom: ConsoleDom;
  private stream: EventStreamHandle;
  private readonly unsubscribe: () => void;

  constructor(
    private readonly doc: Document,
    root: HTMLElement,
    baseUrl = "",
    options: BootstrapOptions = {},
  ) {
    this.client = new GatewayClient(baseUrl);
    this.dom = buildConsole(doc, root);
    this.unsubscribe = this.store.subscribe(() => this.render());
    this.render();

    this.dom.form.addEventListener("submit", (event) => {
      event.preventDefault();
      const text = this.dom.input.value.trim();
      if (!text) return;
      this.dom.input.value = "";
      void this.submitPrompt(text);
    });
    this.dom.estopButton.addEventListener("click", () => {
      void this.invoke(() => this.client.engageEstop());
    });
    this.dom.resetButton.addEventListener("click", () => {
      void this.invoke(() => this.client.resetEstop());
    });

    this.stream = openEventStream(
      this.client.eventsUrl(),
      (data) => this.store.applyEvent(JSON.parse(data) as SessionEvent),
      (status) => {
        this.store.setConnection(status);
        if (status === "connected") {
          // Re-hydrate after every (re)connect so missed motion is not lost.
          void this.client
            .getState()
            .then((snap) => this.store.applySnapshot(snap))
            .catch(() => undefined);
        }
      },
      { retryMs: options.retryMs },
    );
  }

  /** Turn events arrive over the SSE stream; the POST response is not re-applied
   * to avoid duplicating transcript entries. HTTP failures are shown inline. */
  async submitPrompt(text: string): Promise<void> {
    await this.invoke(() => this.client.submitPrompt(text));
  }

  private async invoke(call: () => Promise<unknown>): Promise<void> {
    try {
      await call();
    } catch (err) {
      const message = err instanceof GatewayError ? err.message : `request failed: ${err}`;
      this.store.pushLocalError(message);
    }
  }

  private render(): void {
    render(this.doc, this.dom, this.store.state);
  }

  dispose(): void {
    this.stream.close();
    this.unsubscribe();
  }
}

/** Entry point: mounts the console into `root` and connects to the gateway. */
export function bootstrap(
  doc: Document,
  root: HTMLElement,
  baseUrl = "",
  options: BootstrapOptions = {},
): ConsoleApp {
  return new ConsoleApp(doc, root, baseUrl, options);
}

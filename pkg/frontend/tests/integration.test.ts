/**
 * End-to-end test against the real gateway process: mounts the console in a
 * headless DOM, drives it through prompt submission and e-stop, and asserts
 * on the rendered DOM only.
 */
import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { bootstrap, type ConsoleApp } from "../src/app.js";

const PORT = 20000 + Math.floor(Math.random() * 20000);
const BASE_URL = `http://127.0.0.1:${PORT}`;

let gateway: ChildProcess;
let app: ConsoleApp;

async function waitFor(
  predicate: () => boolean,
  timeoutMs: number,
  what: string,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) return;
    await new Promise((resolve) => setTimeout(resolve, 20));
  }
  throw new Error(`timed out after ${timeoutMs} ms waiting for ${what}`);
}

async function waitForGateway(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE_URL}/api/v1/state`);
      if (resp.ok) return;
    } catch {
      // not listening yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error("gateway did not start listening");
}

beforeAll(async () => {
  const workdir = mkdtempSync(join(tmpdir(), "console-e2e-"));
  gateway = spawn(
    "python3",
    [
      "-m",
      "linguomotor.cli",
      "--port",
      String(PORT),
      "--trace-out",
      join(workdir, "trace.jsonl"),
      "serve",
    ],
    { cwd: workdir, stdio: ["ignore", "pipe", "pipe"] },
  );
  await waitForGateway(15000);
  document.body.innerHTML = '<div id="root"></div>';
  app = bootstrap(document, document.getElementById("root") as HTMLElement, BASE_URL, {
    retryMs: 200,
  });
  await waitFor(() => app.store.state.connection === "connected", 5000, "SSE connection");
  await waitFor(() => app.store.state.joints !== null, 5000, "initial state hydration");
});

afterAll(() => {
  app?.dispose();
  gateway?.kill("SIGTERM");
});

function submit(text: string): void {
  app.dom.input.value = text;
  app.dom.form.dispatchEvent(new Event("submit", { cancelable: true }));
}

describe("operator console against a live gateway", () => {
  it("shows a green badge and a 90° j0 gauge promptly after the state event", async () => {
    // Record render latency: the app's render subscription runs before this
    // listener, so by the time we observe the target angle the DOM reflects it.
    let eventSeenAt = 0;
    let domSettledAt = 0;
    const unsubscribe = app.store.subscribe(() => {
      const j0 = app.store.state.joints?.right_j0 ?? 0;
      if (eventSeenAt === 0 && Math.abs(j0 - Math.PI / 2) < 1e-3) {
        eventSeenAt = Date.now();
        if (app.dom.gauges.right_j0.needle.style.transform === "rotate(90.0deg)") {
          domSettledAt = Date.now();
        }
      }
    });

    submit("rotate the base 90 degrees");
    await waitFor(() => eventSeenAt > 0, 20000, "j0 to reach 90 degrees");
    unsubscribe();

    expect(domSettledAt).toBeGreaterThan(0);
    expect(domSettledAt - eventSeenAt).toBeLessThan(200);
    expect(app.dom.gauges.right_j0.value.textContent).toBe("90.0°");

    await waitFor(
      () => app.store.state.transcript.some((e) => e.kind === "assistant"),
      5000,
      "turn completion",
    );
    const badges = app.dom.transcript.querySelectorAll(".badge");
    expect(badges.length).toBeGreaterThan(0);
    expect(badges[badges.length - 1].className).toBe("badge badge-quantitative");
  });

  it("halts rendered motion and locks input on e-stop, unlocking on reset", async () => {
    submit("move forward at a speed of 0.1 for 6 seconds");
    await waitFor(() => (app.store.state.base?.x ?? 0) > 0.1, 10000, "base to start moving");

    app.dom.estopButton.click();
    await waitFor(() => app.store.state.estop, 5000, "e-stop to engage");
    expect(app.dom.input.disabled).toBe(true);
    expect(app.dom.send.disabled).toBe(true);
    expect(app.dom.estopOverlay.classList.contains("visible")).toBe(true);

    // Let any in-flight state events drain, then confirm motion is frozen.
    await new Promise((resolve) => setTimeout(resolve, 200));
    const frozenX = app.store.state.base?.x ?? 0;
    const frozenReadout = app.dom.baseReadout.textContent;
    await new Promise((resolve) => setTimeout(resolve, 500));
    expect(app.store.state.base?.x).toBe(frozenX);
    expect(app.dom.baseReadout.textContent).toBe(frozenReadout);
    expect(frozenX).toBeLessThan(0.6); // well short of the commanded travel

    app.dom.resetButton.click();
    await waitFor(() => !app.store.state.estop, 5000, "e-stop reset");
    expect(app.dom.input.disabled).toBe(false);
    expect(app.dom.estopOverlay.classList.contains("visible")).toBe(false);
  });
});

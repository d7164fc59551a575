import { beforeEach, describe, expect, it } from "vitest";
import { ConsoleStore } from "../src/state.js";
import type { SessionEvent } from "../src/types.js";
import { buildConsole, render, renderTranscriptEntry, type ConsoleDom } from "../src/views.js";

function event(kind: SessionEvent["kind"], payload: Record<string, unknown>): SessionEvent {
  return { ts_ms: 1, session: "s", kind, payload };
}

describe("console views", () => {
  let dom: ConsoleDom;
  let store: ConsoleStore;

  beforeEach(() => {
    document.body.innerHTML = '<div id="root"></div>';
    dom = buildConsole(document, document.getElementById("root") as HTMLElement);
    store = new ConsoleStore();
  });

  it("builds one labeled gauge per joint", () => {
    const gauges = document.querySelectorAll(".gauge");
    expect(gauges).toHaveLength(7);
    expect(gauges[0].getAttribute("data-joint")).toBe("right_j0");
    expect(gauges[6].getAttribute("data-joint")).toBe("right_j6");
  });

  it("rotates the j0 needle to the joint angle in degrees", () => {
    store.applySnapshot({
      estop: false,
      arm: {
        joints: {
          right_j0: Math.PI / 2,
          right_j1: 0,
          right_j2: 0,
          right_j3: 0,
          right_j4: 0,
          right_j5: 0,
          right_j6: 0,
        },
        pose: {
          position_x: 0,
          position_y: 0,
          position_z: 0,
          orientation_x: 0,
          orientation_y: 0,
          orientation_z: 0,
          orientation_w: 1,
        },
      },
    });
    render(document, dom, store.state);
    expect(dom.gauges.right_j0.needle.style.transform).toBe("rotate(90.0deg)");
    expect(dom.gauges.right_j0.value.textContent).toBe("90.0°");
    expect(dom.gauges.right_j3.needle.style.transform).toBe("rotate(0.0deg)");
  });

  it("renders a green badge for quantitative and amber for qualitative", () => {
    const quant = renderTranscriptEntry(
      document,
      event("granularity", { label: "quantitative", quantities: [] }),
    );
    const qual = renderTranscriptEntry(
      document,
      event("granularity", { label: "qualitative", quantities: [] }),
    );
    expect(quant.querySelector(".badge")?.className).toBe("badge badge-quantitative");
    expect(qual.querySelector(".badge")?.className).toBe("badge badge-qualitative");
    expect(quant.querySelector(".badge")?.textContent).toBe("quantitative");
  });

  it("highlights clarification entries and shows error text", () => {
    const clarification = renderTranscriptEntry(
      document,
      event("clarification", { text: "Can you specify how far up you want to move?" }),
    );
    expect(clarification.classList.contains("highlight")).toBe(true);
    const error = renderTranscriptEntry(document, event("error", { error: "InvalidAction: nope" }));
    expect(error.textContent).toContain("InvalidAction: nope");
  });

  it("appends transcript entries without re-rendering old ones", () => {
    store.setConnection("connected");
    store.applyEvent(event("prompt", { text: "hello" }));
    render(document, dom, store.state);
    const first = dom.transcript.children[0];
    store.applyEvent(event("assistant", { text: "hi" }));
    render(document, dom, store.state);
    expect(dom.transcript.children).toHaveLength(2);
    expect(dom.transcript.children[0]).toBe(first);
    expect(dom.transcript.children[1].textContent).toContain("hi");
  });

  it("locks prompt input and shows the overlay while e-stopped", () => {
    store.setConnection("connected");
    render(document, dom, store.state);
    expect(dom.input.disabled).toBe(false);
    expect(dom.estopOverlay.classList.contains("visible")).toBe(false);

    store.applyEvent(event("estop", { engaged: true }));
    render(document, dom, store.state);
    expect(dom.input.disabled).toBe(true);
    expect(dom.send.disabled).toBe(true);
    expect(dom.resetButton.disabled).toBe(false);
    expect(dom.estopOverlay.classList.contains("visible")).toBe(true);

    store.applyEvent(event("estop", { engaged: false }));
    render(document, dom, store.state);
    expect(dom.input.disabled).toBe(false);
    expect(dom.estopOverlay.classList.contains("visible")).toBe(false);
  });

  it("shows the connection banner states and disables input while disconnected", () => {
    render(document, dom, store.state);
    expect(dom.banner.textContent).toBe("connecting…");
    store.setConnection("disconnected");
    render(document, dom, store.state);
    expect(dom.banner.className).toBe("banner banner-disconnected");
    expect(dom.input.disabled).toBe(true);
    store.setConnection("connected");
    render(document, dom, store.state);
    expect(dom.banner.textContent).toBe("connected");
    expect(dom.input.disabled).toBe(false);
  });

  it("updates the base readout with position in meters and heading in degrees", () => {
    store.applySnapshot({ estop: false, base: { x: 0.25, y: -0.1, theta_deg: 45 } });
    render(document, dom, store.state);
    expect(dom.baseReadout.textContent).toBe("x=0.250 m  y=-0.100 m  θ=45.0°");
  });
});

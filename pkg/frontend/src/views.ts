/** DOM construction and rendering. The console only displays server state;
 * it never integrates motion itself. */

import type { ConsoleState } from "./state.js";
import type { JointName, SessionEvent } from "./types.js";
import { JOINT_NAMES, radToDeg } from "./types.js";

export interface ConsoleDom {
  root: HTMLElement;
  banner: HTMLElement;
  form: HTMLFormElement;
  input: HTMLInputElement;
  send: HTMLButtonElement;
  estopButton: HTMLButtonElement;
  resetButton: HTMLButtonElement;
  transcript: HTMLOListElement;
  gauges: Record<JointName, { needle: HTMLElement; value: HTMLElement }>;
  armCanvas: HTMLCanvasElement;
  baseCanvas: HTMLCanvasElement;
  baseReadout: HTMLElement;
  estopOverlay: HTMLElement;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Builds the full console UI inside `root` and returns handles to the parts. */
export function buildConsole(doc: Document, root: HTMLElement): ConsoleDom {
  root.innerHTML = "";
  root.classList.add("console");

  const header = el(doc, "header");
  header.append(el(doc, "h1", {}, "Operator console"));
  const banner = el(doc, "div", { id: "connection-banner", role: "status" }, "connecting…");
  header.append(banner);

  const transcriptPanel = el(doc, "section", { id: "transcript-panel" });
  transcriptPanel.append(el(doc, "h2", {}, "Transcript"));
  const transcript = el(doc, "ol", { id: "transcript" });
  const form = el(doc, "form", { id: "prompt-form" });
  const input = el(doc, "input", {
    id: "prompt-input",
    type: "text",
    placeholder: "Type a command…",
    autocomplete: "off",
  });
  const send = el(doc, "button", { id: "prompt-send", type: "submit" }, "Send");
  form.append(input, send);
  const controls = el(doc, "div", { id: "controls" });
  const estopButton = el(doc, "button", { id: "estop-button", type: "button" }, "E-STOP");
  const resetButton = el(doc, "button", { id: "reset-button", type: "button" }, "Reset");
  controls.append(estopButton, resetButton);
  transcriptPanel.append(transcript, form, controls);

  const armPanel = el(doc, "section", { id: "arm-panel" });
  armPanel.append(el(doc, "h2", {}, "Arm"));
  const gaugeRow = el(doc, "div", { id: "gauges" });
  const gauges = {} as ConsoleDom["gauges"];
  for (const name of JOINT_NAMES) {
    const gauge = el(doc, "div", { class: "gauge", "data-joint": name });
    const dial = el(doc, "div", { class: "dial" });
    const needle = el(doc, "div", { class: "needle" });
    dial.append(needle);
    const value = el(doc, "span", { class: "gauge-value" }, "—");
    gauge.append(el(doc, "span", { class: "gauge-label" }, name), dial, value);
    gaugeRow.append(gauge);
    gauges[name] = { needle, value };
  }
  const armCanvas = el(doc, "canvas", { id: "arm-canvas", width: "320", height: "200" });
  armPanel.append(gaugeRow, armCanvas);

  const basePanel = el(doc, "section", { id: "base-panel" });
  basePanel.append(el(doc, "h2", {}, "Base (top-down)"));
  const baseCanvas = el(doc, "canvas", { id: "base-canvas", width: "320", height: "320" });
  const baseReadout = el(doc, "div", { id: "base-readout" }, "—");
  basePanel.append(baseCanvas, baseReadout);

  const estopOverlay = el(doc, "div", { id: "estop-overlay" }, "EMERGENCY STOP ENGAGED");

  root.append(header, transcriptPanel, armPanel, basePanel, estopOverlay);
  return {
    root,
    banner,
    form,
    input,
    send,
    estopButton,
    resetButton,
    transcript,
    gauges,
    armCanvas,
    baseCanvas,
    baseReadout,
    estopOverlay,
  };
}

export function renderTranscriptEntry(doc: Document, event: SessionEvent): HTMLLIElement {
  const item = el(doc, "li", { class: `entry entry-${event.kind}` });
  const p = event.payload;
  switch (event.kind) {
    case "prompt":
      item.append(el(doc, "span", { class: "who" }, "you"), doc.createTextNode(String(p["text"])));
      break;
    case "granularity": {
      const label = String(p["label"]);
      item.append(el(doc, "span", { class: `badge badge-${label}` }, label));
      break;
    }
    case "tool_call":
      item.append(
        el(doc, "code", {}, `${String(p["name"])}(${JSON.stringify(p["arguments"])})`),
      );
      break;
    case "tool_result":
      item.append(el(doc, "code", {}, JSON.stringify(p["result"] ?? p)));
      break;
    case "assistant":
      item.append(el(doc, "span", { class: "who" }, "robot"), doc.createTextNode(String(p["text"])));
      break;
    case "clarification":
      item.classList.add("highlight");
      item.append(el(doc, "span", { class: "who" }, "robot"), doc.createTextNode(String(p["text"])));
      break;
    case "estop":
      item.append(doc.createTextNode(p["engaged"] ? "e-stop engaged" : "e-stop reset"));
      break;
    case "error":
      item.append(doc.createTextNode(String(p["error"])));
      break;
    default:
      item.append(doc.createTextNode(JSON.stringify(p)));
  }
  return item;
}

function canvas2d(canvas: HTMLCanvasElement): CanvasRenderingContext2D | null {
  try {
    return canvas.getContext("2d");
  } catch {
    return null; // headless DOM without canvas support
  }
}

function drawBase(canvas: HTMLCanvasElement, state: ConsoleState): void {
  const ctx = canvas2d(canvas);
  if (!ctx || !state.base) return;
  const { width, height } = canvas;
  const scale = 40; // pixels per meter
  const cx = width / 2;
  const cy = height / 2;
  const toPx = (x: number, y: number): [number, number] => [cx + x * scale, cy - y * scale];

  ctx.clearRect(0, 0, width, height);
  ctx.strokeStyle = "#2a3442";
  ctx.lineWidth = 1;
  for (let m = -4; m <= 4; m++) {
    const [gx] = toPx(m, 0);
    const [, gy] = toPx(0, m);
    ctx.beginPath();
    ctx.moveTo(gx, 0);
    ctx.lineTo(gx, height);
    ctx.stroke();
    ctx.beginPath();
    ctx.moveTo(0, gy);
    ctx.lineTo(width, gy);
    ctx.stroke();
  }

  if (state.trail.length > 1) {
    ctx.strokeStyle = "#4aa3ff";
    ctx.lineWidth = 2;
    ctx.beginPath();
    const [sx, sy] = toPx(state.trail[0].x, state.trail[0].y);
    ctx.moveTo(sx, sy);
    for (const point of state.trail.slice(1)) {
      const [px, py] = toPx(point.x, point.y);
      ctx.lineTo(px, py);
    }
    ctx.stroke();
  }

  const theta = (state.base.theta_deg * Math.PI) / 180;
  const [bx, by] = toPx(state.base.x, state.base.y);
  ctx.fillStyle = "#e8eef4";
  ctx.beginPath();
  ctx.arc(bx, by, 6, 0, 2 * Math.PI);
  ctx.fill();
  ctx.strokeStyle = "#ffcf5c";
  ctx.lineWidth = 3;
  ctx.beginPath();
  ctx.moveTo(bx, by);
  ctx.lineTo(bx + 18 * Math.cos(theta), by - 18 * Math.sin(theta));
  ctx.stroke();
}

function drawArm(canvas: HTMLCanvasElement, state: ConsoleState): void {
  const ctx = canvas2d(canvas);
  if (!ctx || !state.joints) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  // Schematic stick figure: links chained by successive joint angles.
  let x = 30;
  let y = height - 20;
  let angle = -Math.PI / 2;
  const linkLen = (height - 40) / JOINT_NAMES.length;
  ctx.strokeStyle = "#7ce0a3";
  ctx.lineWidth = 3;
  ctx.beginPath();
  ctx.moveTo(x, y);
  for (const name of JOINT_NAMES) {
    angle += state.joints[name] * 0.35;
    x += linkLen * Math.cos(angle);
    y += linkLen * Math.sin(angle);
    ctx.lineTo(x, y);
  }
  ctx.stroke();
}

/** Applies the full console state to the DOM. Idempotent and synchronous. */
export function render(doc: Document, dom: ConsoleDom, state: ConsoleState): void {
  const connected = state.connection === "connected";
  dom.banner.textContent =
    state.connection === "connected"
      ? "connected"
      : state.connection === "connecting"
        ? "connecting…"
        : "disconnected — retrying";
  dom.banner.className = `banner banner-${state.connection}`;

  const locked = state.estop || !connected;
  dom.input.disabled = locked;
  dom.send.disabled = locked;
  dom.estopButton.disabled = !connected;
  dom.resetButton.disabled = !connected || !state.estop;
  dom.estopOverlay.classList.toggle("visible", state.estop);
  dom.root.classList.toggle("estopped", state.estop);

  if (state.joints) {
    for (const name of JOINT_NAMES) {
      const deg = radToDeg(state.joints[name]);
      const gauge = dom.gauges[name];
      gauge.needle.style.transform = `rotate(${deg.toFixed(1)}deg)`;
      gauge.value.textContent = `${deg.toFixed(1)}°`;
    }
  }
  if (state.base) {
    dom.baseReadout.textContent =
      `x=${state.base.x.toFixed(3)} m  y=${state.base.y.toFixed(3)} m  ` +
      `θ=${state.base.theta_deg.toFixed(1)}°`;
  }
  drawArm(dom.armCanvas, state);
  drawBase(dom.baseCanvas, state);

  // Transcript is append-only: render only entries not yet in the DOM.
  for (let i = dom.transcript.children.length; i < state.transcript.length; i++) {
    dom.transcript.append(renderTranscriptEntry(doc, state.transcript[i]));
  }
}

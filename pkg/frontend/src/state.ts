/** Console state container: a small observable store with pure update methods. */

import type {
  ArmPose,
  BaseState,
  ConnectionStatus,
  GatewaySnapshot,
  JointMap,
  SessionEvent,
} from "./types.js";

export const TRAIL_LIMIT = 500;

export interface TrailPoint {
  x: number;
  y: number;
}

export interface ConsoleState {
  connection: ConnectionStatus;
  estop: boolean;
  joints: JointMap | null;
  armPose: ArmPose | null;
  base: BaseState | null;
  trail: TrailPoint[];
  /** Append-only log of non-state session events, in arrival order. */
  transcript: SessionEvent[];
}

function initialState(): ConsoleState {
  return {
    connection: "connecting",
    estop: false,
    joints: null,
    armPose: null,
    base: null,
    trail: [],
    transcript: [],
  };
}

export class ConsoleStore {
  state: ConsoleState = initialState();
  private listeners: Array<() => void> = [];

  subscribe(listener: () => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((fn) => fn !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  setConnection(status: ConnectionStatus): void {
    if (this.state.connection === status) return;
    this.state.connection = status;
    this.notify();
  }

  /** Applies a full snapshot (initial GET /state or a "state" event payload). */
  applySnapshot(snap: GatewaySnapshot): void {
    this.state.estop = snap.estop;
    if (snap.arm) {
      this.state.joints = snap.arm.joints;
      this.state.armPose = snap.arm.pose;
    }
    if (snap.base) {
      const { x, y, theta_deg } = snap.base;
      this.state.base = { x, y, theta_deg };
      const last = this.state.trail[this.state.trail.length - 1];
      if (!last || last.x !== x || last.y !== y) {
        this.state.trail.push({ x, y });
        if (this.state.trail.length > TRAIL_LIMIT) {
          this.state.trail.splice(0, this.state.trail.length - TRAIL_LIMIT);
        }
      }
    }
    this.notify();
  }

  applyEvent(event: SessionEvent): void {
    if (event.kind === "state") {
      this.applySnapshot(event.payload as unknown as GatewaySnapshot);
      return;
    }
    if (event.kind === "estop") {
      this.state.estop = Boolean(event.payload["engaged"]);
    }
    this.state.transcript.push(event);
    this.notify();
  }

  /** Records a client-side failure (e.g. a rejected prompt POST) in the transcript. */
  pushLocalError(message: string): void {
    this.state.transcript.push({
      ts_ms: Date.now(),
      session: "console",
      kind: "error",
      payload: { error: message },
    });
    this.notify();
  }
}

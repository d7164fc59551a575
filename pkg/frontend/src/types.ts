/** Wire types mirrored from the gateway HTTP API and event stream. */

export type EventKind =
  | "prompt"
  | "granularity"
  | "tool_call"
  | "tool_result"
  | "assistant"
  | "clarification"
  | "state"
  | "estop"
  | "error";

export interface SessionEvent {
  ts_ms: number;
  session: string;
  kind: EventKind;
  payload: Record<string, unknown>;
}

export const JOINT_NAMES = [
  "right_j0",
  "right_j1",
  "right_j2",
  "right_j3",
  "right_j4",
  "right_j5",
  "right_j6",
] as const;

export type JointName = (typeof JOINT_NAMES)[number];

export type JointMap = Record<JointName, number>;

export interface ArmPose {
  position_x: number;
  position_y: number;
  position_z: number;
  orientation_x: number;
  orientation_y: number;
  orientation_z: number;
  orientation_w: number;
}

export interface BaseState {
  x: number;
  y: number;
  theta_deg: number;
}

/** Shape of GET /api/v1/state and of "state" event payloads. */
export interface GatewaySnapshot {
  estop: boolean;
  arm?: { joints: JointMap; pose: ArmPose; moving?: boolean };
  base?: { x: number; y: number; theta?: number; theta_deg: number; moving?: boolean };
}

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export function radToDeg(rad: number): number {
  return (rad * 180) / Math.PI;
}

"""Conversation loop: prompt -> granularity -> tool call -> motion -> reply.

Every externally observable action becomes exactly one SessionEvent; the
event list is the transcript, the trace file, and the replay input.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

from .backend import Backend, BackendReply
from .errors import BackendError, LinguomotorError, SimError
from .granularity import classify_granularity
from .model import rad_to_deg
from .safety import DEFAULT_BOUNDS, SafetyBounds, clamp_qualitative
from .sim import World
from .tools import ToolCall

EVENT_KINDS = (
    "prompt",
    "granularity",
    "tool_call",
    "tool_result",
    "assistant",
    "clarification",
    "state",
    "estop",
    "error",
)

TOOL_TOPICS = {
    "move_arm_to_joint_positions": "/arm/joint_command",
    "approach_pose": "/arm/pose_command",
    "drive": "/base/cmd_vel",
}


@dataclass(frozen=True)
class SessionEvent:
    ts_ms: int
    session: str
    kind: str
    payload: Dict[str, Any]

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")

    def to_json(self) -> Dict[str, Any]:
        return {"ts_ms": self.ts_ms, "session": self.session, "kind": self.kind, "payload": self.payload}

    @classmethod
    def from_json(cls, obj: Dict[str, Any]) -> "SessionEvent":
        return cls(ts_ms=obj["ts_ms"], session=obj["session"], kind=obj["kind"], payload=obj["payload"])


class TraceWriter:
    """Append-only JSON Lines trace, flushed per event for crash safety."""

    def __init__(self, path: str):
        self.path = path
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        self._fh = open(path, "a", encoding="utf-8")
        self._lock = threading.Lock()

    def write(self, event: SessionEvent) -> None:
        line = json.dumps(event.to_json(), separators=(",", ":"), sort_keys=True)
        with self._lock:
            self._fh.write(line + "\n")
            self._fh.flush()

    def close(self) -> None:
        with self._lock:
            self._fh.close()


def dispatch_tool_call(world: World, call: ToolCall) -> None:
    """Publish a validated tool call on its command topic."""
    topic = TOOL_TOPICS[call.tool]
    if call.tool == "move_arm_to_joint_positions":
        world.bus.publish(topic, call.arguments["joint_positions"])
    else:
        world.bus.publish(topic, dict(call.arguments))


def achieved_state(world: World, call: ToolCall) -> Dict[str, Any]:
    """State payload returned to the backend as the function response."""
    if call.tool == "move_arm_to_joint_positions":
        return world.arm.joints.to_json()
    if call.tool == "approach_pose":
        return world.arm.pose.to_json()
    pose = world.base.pose
    return {"x": pose.x, "y": pose.y, "theta": pose.theta, "theta_deg": rad_to_deg(pose.theta)}


class Session:
    """One strictly sequential prompt/response session against a world.

    motion_waiter controls how sim time passes while a command runs:
    the default advances virtual time as fast as possible; the serving
    gateway substitutes a wall-clock waiter driven by its ticker thread.
    """

    def __init__(self, name: str, world: World, backend: Backend,
                 bounds: SafetyBounds = DEFAULT_BOUNDS,
                 trace: Optional[TraceWriter] = None,
                 motion_waiter: Optional[Callable[[World], None]] = None):
        self.name = name
        self.world = world
        self.backend = backend
        self.bounds = bounds
        self.trace = trace
        self.motion_waiter = motion_waiter or (lambda w: w.run_until_idle())
        self.listeners: List[Callable[[SessionEvent], None]] = []
        self._prompt_count = 0
        self._last_ts = 0
        self._lock = threading.Lock()

    # -- events ---------------------------------------------------------

    def _now_ms(self) -> int:
        now = time.monotonic_ns() // 1_000_000
        self._last_ts = max(self._last_ts, now)
        return self._last_ts

    def emit(self, kind: str, payload: Dict[str, Any], transient: bool = False) -> SessionEvent:
        event = SessionEvent(ts_ms=self._now_ms(), session=self.name, kind=kind, payload=payload)
        if self.trace is not None and not transient:
            self.trace.write(event)
        for listener in list(self.listeners):
            listener(event)
        return event

    def emit_state(self) -> SessionEvent:
        return self.emit("state", self.world.state_snapshot(), transient=True)

    # -- the conversation loop -------------------------------------------

    def run_turn(self, prompt: str) -> List[SessionEvent]:
        with self._lock:
            return self._run_turn_locked(prompt)

    def _run_turn_locked(self, prompt: str) -> List[SessionEvent]:
        events: List[SessionEvent] = []
        self._prompt_count += 1
        prompt_id = f"p{self._prompt_count:04d}"
        events.append(self.emit("prompt", {"prompt_id": prompt_id, "text": prompt}))

        if self.world.estopped:
            events.append(self.emit("error", {
                "prompt_id": prompt_id,
                "reason": "EStopEngaged",
                "message": "e-stop engaged; reset before sending prompts",
            }))
            return events

        label = classify_granularity(prompt)
        events.append(self.emit("granularity", {"prompt_id": prompt_id, **label.to_json()}))

        try:
            reply = self.backend.complete(prompt, self.world.state_snapshot())
        except BackendError as exc:
            events.append(self.emit("error", {
                "prompt_id": prompt_id,
                "reason": type(exc).__name__,
                "message": str(exc),
            }))
            return events

        if reply.kind == "clarification":
            events.append(self.emit("clarification", {"prompt_id": prompt_id, "text": reply.clarification}))
            return events
        if reply.kind == "refusal":
            events.append(self.emit("error", {
                "prompt_id": prompt_id,
                "reason": "BackendRefusal",
                "message": reply.refusal,
            }))
            return events

        call = ToolCall(
            tool=reply.tool_call.tool,
            arguments=reply.tool_call.arguments,
            call_id=reply.tool_call.call_id,
            source=reply.tool_call.source,
            prompt_id=prompt_id,
        )
        clamped = clamp_qualitative(call, label, self.world.state_snapshot(), self.bounds)
        call_payload = clamped.to_json()
        call_payload["granularity"] = label.label
        call_payload["clamped"] = clamped.arguments != call.arguments
        if call_payload["clamped"]:
            call_payload["unclamped_arguments"] = call.arguments
        events.append(self.emit("tool_call", call_payload))

        try:
            dispatch_tool_call(self.world, clamped)
        except (SimError, LinguomotorError) as exc:
            events.append(self.emit("error", {
                "prompt_id": prompt_id,
                "reason": type(exc).__name__,
                "message": str(exc),
            }))
            return events

        self.motion_waiter(self.world)
        result = achieved_state(self.world, clamped)
        events.append(self.emit("tool_result", {
            "prompt_id": prompt_id,
            "call_id": clamped.call_id,
            "tool": clamped.tool,
            "result": result,
        }))

        try:
            text = self.backend.follow_up(clamped, result)
        except BackendError as exc:
            events.append(self.emit("error", {
                "prompt_id": prompt_id,
                "reason": type(exc).__name__,
                "message": str(exc),
            }))
            return events
        events.append(self.emit("assistant", {"prompt_id": prompt_id, "text": text}))
        return events

    # -- safety -----------------------------------------------------------

    def estop(self) -> SessionEvent:
        self.backend.cancel()
        self.world.engage_estop()
        return self.emit("estop", {"engaged": True})

    def reset_estop(self) -> SessionEvent:
        self.world.reset_estop()
        return self.emit("estop", {"engaged": False})

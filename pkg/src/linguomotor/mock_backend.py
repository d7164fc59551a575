"""Deterministic grammar-based language backend.

Turns the supported prompt phrasings into tool calls with no network and
no randomness, so the whole pipeline is testable offline. First matching
rule wins; anything else becomes a clarification request.

Grammar, in match order:
  (b) "move <joint> to the (left|right) by <N> degrees"  -> absolute -/+N deg
  (a) "move <joint> by <N> degrees"                      -> relative +N deg
  (c) "rotate the base <N> degrees"                      -> relative +N deg on right_j0
  (d) "move all joints to <v>"                           -> absolute v rad, all joints
  (e) "move the arm to position_x = <x>, position_y = <y>[, and] position_z = <z>
       [while keeping the current orientation]"          -> approach_pose
  (f) "move (forward|back|backward) [at a speed of <v>] [for <t> seconds]"
      "move along x-axis with a speed of <v> m/s for <t> seconds"
                                                          -> drive
  (g) "move the arm (up|down)"                            -> -/+0.1 rad on right_j1
  (h) "rotate the arm"                                    -> +0.2 rad on right_j6

Rule (b) is absolute (not relative) because an absolute reading is the
only one consistent with the observed behavior this grammar mimics.
Rule (f) speed defaults: bare direction words use a conservative
0.1 m/s; a direction with an explicit duration but no speed uses the
full 1.0 m/s, mirroring the recorded behavior for that phrasing.
"""

from __future__ import annotations

import json
import re
from typing import Any, Dict, Optional

from .backend import Backend, BackendReply
from .model import JOINT_NAMES, deg_to_rad
from .tools import ToolCall

_NUM = r"[-+]?\d+(?:\.\d+)?"
_JOINT = r"(right_j[0-6])"

_RE_ABS_DIRECTED = re.compile(
    rf"^move\s+{_JOINT}\s+to\s+the\s+(left|right)\s+by\s+({_NUM})\s+degrees?$", re.I)
_RE_JOINT_DELTA = re.compile(rf"^move\s+{_JOINT}\s+by\s+({_NUM})\s+degrees?$", re.I)
_RE_ROTATE_BASE = re.compile(rf"^rotate\s+the\s+base\s+({_NUM})\s+degrees?$", re.I)
_RE_ALL_JOINTS = re.compile(rf"^move\s+all\s+joints\s+to\s+({_NUM})$", re.I)
_RE_POSE = re.compile(
    rf"^move\s+the\s+arm\s+to\s+pos(?:i)?tion_x\s*=\s*({_NUM})\s*,\s*"
    rf"position_y\s*=\s*({_NUM})\s*,?\s*(?:and\s+)?position_z\s*=\s*({_NUM})"
    rf"(\s+while\s+keeping\s+the\s+current\s+orientation)?$",
    re.I,
)
_RE_DRIVE_XAXIS = re.compile(
    rf"^move\s+along\s+x-axis\s+with\s+a\s+speed\s+of\s+({_NUM})\s*m/s\s+for\s+({_NUM})\s+seconds?$",
    re.I,
)
_RE_DRIVE_DIR = re.compile(
    rf"^move\s+(forward|backward|back)"
    rf"(?:\s+at\s+a\s+speed\s+of\s+({_NUM})(?:\s*m/s)?)?"
    rf"(?:\s+for\s+({_NUM})\s+seconds?)?$",
    re.I,
)
_RE_DRIVE_TURN = re.compile(
    rf"^turn(?:ing)?\s+at\s+({_NUM})\s+degrees?\s+per\s+second(?:\s+for\s+({_NUM})\s+seconds?)?$",
    re.I,
)
_RE_ARM_UPDOWN = re.compile(r"^move\s+the\s+arm\s+(up|down)$", re.I)
_RE_ROTATE_ARM = re.compile(r"^rotate\s+the\s+arm$", re.I)

_RE_DIRECTION_WORD = re.compile(r"\b(up|down|left|right|forward|back|backward)\b", re.I)

CLARIFICATION = (
    "Can you specify how far{direction} you want to move? Please include a "
    "magnitude such as degrees, a speed in m/s, or a duration in seconds."
)


def clarification_for(text: str) -> str:
    """Clarification request, echoing the prompt's direction word if any."""
    m = _RE_DIRECTION_WORD.search(text)
    direction = f" {m.group(1).lower()}" if m else ""
    return CLARIFICATION.format(direction=direction)

# conservative defaults for direction-only drive prompts
QUALITATIVE_SPEED = 0.1
FULL_SPEED = 1.0
DEFAULT_DURATION = 1.0
ARM_UPDOWN_DELTA = 0.1
ROTATE_ARM_DELTA = 0.2


def _current_joints(context: Dict[str, Any]) -> Dict[str, float]:
    arm = context.get("arm") or {}
    joints = arm.get("joints") or {name: 0.0 for name in JOINT_NAMES}
    return {name: float(joints[name]) for name in JOINT_NAMES}


def _current_orientation(context: Dict[str, Any]) -> Dict[str, float]:
    arm = context.get("arm") or {}
    pose = arm.get("pose") or {}
    return {
        "orientation_x": float(pose.get("orientation_x", 0.0)),
        "orientation_y": float(pose.get("orientation_y", 0.0)),
        "orientation_z": float(pose.get("orientation_z", 0.0)),
        "orientation_w": float(pose.get("orientation_w", 1.0)),
    }


class MockBackend(Backend):
    """Pure, deterministic parser over the documented grammar."""

    name = "mock"

    def __init__(self, enable_turn_rate: bool = False):
        # yaw-rate phrasing is a documented extension, off by default to
        # keep the corpus behavior faithful to the recorded sessions
        self.enable_turn_rate = enable_turn_rate

    def complete(self, prompt: str, context: Dict[str, Any]) -> BackendReply:
        text = " ".join(prompt.strip().split())
        parsed = self._parse(text, context)
        if parsed is None:
            return BackendReply(clarification=clarification_for(text))
        tool, arguments, text_reply = parsed
        call = ToolCall(tool=tool, arguments=arguments, source=self.name)
        return BackendReply(tool_call=call, assistant_text=text_reply)

    def follow_up(self, call: ToolCall, result: Dict[str, Any]) -> str:
        return f"Executed {call.tool}; the robot reports: {json.dumps(result, sort_keys=True)}"

    def _parse(self, text: str, context: Dict[str, Any]) -> Optional[tuple]:
        m = _RE_ABS_DIRECTED.match(text)
        if m:
            joint, direction, mag = m.group(1).lower(), m.group(2).lower(), float(m.group(3))
            sign = -1.0 if direction == "left" else 1.0
            joints = _current_joints(context)
            joints[joint] = sign * deg_to_rad(mag)
            return (
                "move_arm_to_joint_positions",
                {"joint_positions": joints},
                f"Moving {joint} to the {direction} to {sign * mag:g} degrees absolute.",
            )

        m = _RE_JOINT_DELTA.match(text)
        if m:
            joint, mag = m.group(1).lower(), float(m.group(2))
            joints = _current_joints(context)
            joints[joint] = joints[joint] + deg_to_rad(mag)
            return (
                "move_arm_to_joint_positions",
                {"joint_positions": joints},
                f"Moving {joint} by {mag:g} degrees from its current angle.",
            )

        m = _RE_ROTATE_BASE.match(text)
        if m:
            mag = float(m.group(1))
            joints = _current_joints(context)
            joints["right_j0"] = joints["right_j0"] + deg_to_rad(mag)
            return (
                "move_arm_to_joint_positions",
                {"joint_positions": joints},
                f"Rotating the base joint right_j0 by {mag:g} degrees.",
            )

        m = _RE_ALL_JOINTS.match(text)
        if m:
            value = float(m.group(1))
            joints = {name: value for name in JOINT_NAMES}
            return (
                "move_arm_to_joint_positions",
                {"joint_positions": joints},
                f"Moving all joints to {value:g} radians.",
            )

        m = _RE_POSE.match(text)
        if m:
            x, y, z = float(m.group(1)), float(m.group(2)), float(m.group(3))
            keep = m.group(4) is not None
            if keep:
                orientation = _current_orientation(context)
            else:
                orientation = {
                    "orientation_x": 0.0,
                    "orientation_y": 0.0,
                    "orientation_z": 0.0,
                    "orientation_w": 1.0,
                }
            arguments = {"position_x": x, "position_y": y, "position_z": z, **orientation}
            how = "keeping the current orientation" if keep else "with identity orientation"
            return ("approach_pose", arguments, f"Approaching ({x:g}, {y:g}, {z:g}) {how}.")

        m = _RE_DRIVE_XAXIS.match(text)
        if m:
            v, t = float(m.group(1)), float(m.group(2))
            return (
                "drive",
                {"v_x": v, "omega": 0.0, "duration": t},
                f"Driving along x at {v:g} m/s for {t:g} s.",
            )

        m = _RE_DRIVE_DIR.match(text)
        if m:
            direction = m.group(1).lower()
            sign = 1.0 if direction == "forward" else -1.0
            speed = m.group(2)
            duration = m.group(3)
            if speed is not None:
                v = sign * float(speed)
            elif duration is not None:
                v = sign * FULL_SPEED
            else:
                v = sign * QUALITATIVE_SPEED
            t = float(duration) if duration is not None else DEFAULT_DURATION
            return (
                "drive",
                {"v_x": v, "omega": 0.0, "duration": t},
                f"Driving {direction} at {v:g} m/s for {t:g} s.",
            )

        if self.enable_turn_rate:
            m = _RE_DRIVE_TURN.match(text)
            if m:
                rate = deg_to_rad(float(m.group(1)))
                t = float(m.group(2)) if m.group(2) is not None else DEFAULT_DURATION
                return (
                    "drive",
                    {"v_x": 0.0, "omega": rate, "duration": t},
                    f"Turning at {m.group(1)} degrees per second for {t:g} s.",
                )

        m = _RE_ARM_UPDOWN.match(text)
        if m:
            direction = m.group(1).lower()
            delta = -ARM_UPDOWN_DELTA if direction == "up" else ARM_UPDOWN_DELTA
            joints = _current_joints(context)
            joints["right_j1"] = joints["right_j1"] + delta
            return (
                "move_arm_to_joint_positions",
                {"joint_positions": joints},
                f"Moving the arm {direction} with a small right_j1 adjustment.",
            )

        if _RE_ROTATE_ARM.match(text):
            joints = _current_joints(context)
            joints["right_j6"] = joints["right_j6"] + ROTATE_ARM_DELTA
            return (
                "move_arm_to_joint_positions",
                {"joint_positions": joints},
                "Rotating the wrist joint right_j6 slightly.",
            )

        return None

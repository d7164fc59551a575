"""Qualitative-prompt safety clamp.

Qualitative prompts carry no magnitudes, so the gateway caps what they
can do: small per-joint deltas, short pose translations, slow drives.
Quantitative calls pass through untouched; the operator stated what
they wanted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict

from .granularity import GranularityLabel
from .model import JOINT_NAMES
from .tools import ToolCall


@dataclass(frozen=True)
class SafetyBounds:
    joint_delta_max: float = 0.2       # rad per joint per command
    pose_translation_max: float = 0.1  # meters per command
    v_max: float = 0.1                 # m/s
    duration_max: float = 2.0          # seconds

DEFAULT_BOUNDS = SafetyBounds()


def clamp_qualitative(call: ToolCall, label: GranularityLabel,
                      context: Dict[str, Any],
                      bounds: SafetyBounds = DEFAULT_BOUNDS) -> ToolCall:
    """Limit the reach of a qualitative tool call relative to current state."""
    if not label.qualitative:
        return call
    if call.tool == "move_arm_to_joint_positions":
        current = (context.get("arm") or {}).get("joints") or {n: 0.0 for n in JOINT_NAMES}
        clamped = {}
        for name in JOINT_NAMES:
            cur = float(current[name])
            delta = call.arguments["joint_positions"][name] - cur
            delta = max(-bounds.joint_delta_max, min(bounds.joint_delta_max, delta))
            clamped[name] = cur + delta
        return _with_arguments(call, {"joint_positions": clamped})
    if call.tool == "approach_pose":
        pose = (context.get("arm") or {}).get("pose") or {}
        cx = float(pose.get("position_x", 0.0))
        cy = float(pose.get("position_y", 0.0))
        cz = float(pose.get("position_z", 0.0))
        dx = call.arguments["position_x"] - cx
        dy = call.arguments["position_y"] - cy
        dz = call.arguments["position_z"] - cz
        dist = math.sqrt(dx * dx + dy * dy + dz * dz)
        if dist <= bounds.pose_translation_max:
            return call
        scale = bounds.pose_translation_max / dist
        args = dict(call.arguments)
        args["position_x"] = cx + dx * scale
        args["position_y"] = cy + dy * scale
        args["position_z"] = cz + dz * scale
        return _with_arguments(call, args)
    if call.tool == "drive":
        args = dict(call.arguments)
        args["v_x"] = max(-bounds.v_max, min(bounds.v_max, args["v_x"]))
        args["duration"] = min(bounds.duration_max, args["duration"])
        if args == call.arguments:
            return call
        return _with_arguments(call, args)
    return call


def _with_arguments(call: ToolCall, arguments: Dict[str, Any]) -> ToolCall:
    return ToolCall(
        tool=call.tool,
        arguments=arguments,
        call_id=call.call_id,
        source=call.source,
        prompt_id=call.prompt_id,
    )

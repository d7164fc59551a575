"""Tool (function-call) schema registry and validated tool calls.

Exactly three tools exist: joint-space arm control, pose-space arm
control, and a velocity drive for the base. Every tool call that
reaches a robot must validate against its schema first.
"""

from __future__ import annotations

import math
import uuid
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional

import jsonschema

from . import schemas
from .errors import InvalidAction
from .model import JOINT_NAMES


@dataclass(frozen=True)
class ToolSchema:
    name: str
    parameters: dict        # JSON schema for the arguments object
    description: str

    def __post_init__(self):
        # compile once; validation runs on every tool call
        validator_cls = jsonschema.validators.validator_for(self.parameters)
        validator_cls.check_schema(self.parameters)
        object.__setattr__(self, "_validator", validator_cls(self.parameters))

    def validate(self, arguments: Mapping[str, Any]) -> None:
        for error in self._validator.iter_errors(arguments):
            raise InvalidAction(f"{self.name}: {error.message}") from error
        _check_finite(self.name, arguments)


def _check_finite(tool: str, value: Any) -> None:
    if isinstance(value, dict):
        for v in value.values():
            _check_finite(tool, v)
    elif isinstance(value, (int, float)) and not isinstance(value, bool):
        if not math.isfinite(value):
            raise InvalidAction(f"{tool}: non-finite argument {value!r}")


MOVE_ARM_TO_JOINT_POSITIONS = ToolSchema(
    name="move_arm_to_joint_positions",
    parameters={
        "type": "object",
        "properties": {"joint_positions": schemas.JOINT_VECTOR_SCHEMA},
        "required": ["joint_positions"],
        "additionalProperties": False,
    },
    description=(
        "Move the 7-joint arm to absolute joint angles in radians. "
        "joint_positions must contain exactly right_j0..right_j6."
    ),
)

APPROACH_POSE = ToolSchema(
    name="approach_pose",
    parameters=schemas.ARM_POSE_SCHEMA,
    description=(
        "Move the arm end-effector to a Cartesian pose: position_x/y/z in "
        "meters plus a unit quaternion orientation_x/y/z/w."
    ),
)

DRIVE = ToolSchema(
    name="drive",
    parameters=schemas.VELOCITY_COMMAND_SCHEMA,
    description=(
        "Drive the mobile base: forward speed v_x in m/s, yaw rate omega "
        "in rad/s, for duration seconds."
    ),
)

REGISTRY: Dict[str, ToolSchema] = {
    t.name: t for t in (MOVE_ARM_TO_JOINT_POSITIONS, APPROACH_POSE, DRIVE)
}


@dataclass(frozen=True)
class ToolCall:
    tool: str
    arguments: Dict[str, Any]
    call_id: str = field(default_factory=lambda: f"call_{uuid.uuid4().hex[:8]}")
    source: str = "mock"            # mock | remote
    prompt_id: Optional[str] = None

    def __post_init__(self):
        schema = REGISTRY.get(self.tool)
        if schema is None:
            raise InvalidAction(f"unknown tool {self.tool!r}")
        schema.validate(self.arguments)

    def to_json(self) -> Dict[str, Any]:
        return {
            "tool": self.tool,
            "arguments": self.arguments,
            "call_id": self.call_id,
            "source": self.source,
            "prompt_id": self.prompt_id,
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "ToolCall":
        return cls(
            tool=obj["tool"],
            arguments=dict(obj["arguments"]),
            call_id=obj.get("call_id", "call_replay"),
            source=obj.get("source", "mock"),
            prompt_id=obj.get("prompt_id"),
        )


def tool_definitions() -> list:
    """Tool list in chat-completions wire format."""
    return [
        {
            "type": "function",
            "function": {
                "name": t.name,
                "description": t.description,
                "parameters": t.parameters,
            },
        }
        for t in REGISTRY.values()
    ]

"""Canonical JSON schemas for the bus topics and trace payloads."""

from .model import JOINT_NAMES

_NUMBER = {"type": "number"}

JOINT_VECTOR_SCHEMA = {
    "type": "object",
    "properties": {name: _NUMBER for name in JOINT_NAMES},
    "required": list(JOINT_NAMES),
    "additionalProperties": False,
}

ARM_POSE_SCHEMA = {
    "type": "object",
    "properties": {
        "position_x": _NUMBER,
        "position_y": _NUMBER,
        "position_z": _NUMBER,
        "orientation_x": _NUMBER,
        "orientation_y": _NUMBER,
        "orientation_z": _NUMBER,
        "orientation_w": _NUMBER,
    },
    "required": [
        "position_x",
        "position_y",
        "position_z",
        "orientation_x",
        "orientation_y",
        "orientation_z",
        "orientation_w",
    ],
    "additionalProperties": False,
}

VELOCITY_COMMAND_SCHEMA = {
    "type": "object",
    "properties": {
        "v_x": _NUMBER,
        "omega": _NUMBER,
        "duration": {"type": "number", "minimum": 0},
    },
    "required": ["v_x", "omega", "duration"],
    "additionalProperties": False,
}

# theta_deg is display parity with how mobile-base headings are usually
# reported (degrees); theta stays the canonical radians field.
BASE_POSE_SCHEMA = {
    "type": "object",
    "properties": {
        "x": _NUMBER,
        "y": _NUMBER,
        "theta": _NUMBER,
        "theta_deg": _NUMBER,
    },
    "required": ["x", "y", "theta"],
    "additionalProperties": False,
}

ESTOP_SCHEMA = {
    "type": "object",
    "properties": {"engaged": {"type": "boolean"}},
    "required": ["engaged"],
    "additionalProperties": False,
}

TOPIC_SCHEMAS = {
    "/arm/joint_command": JOINT_VECTOR_SCHEMA,
    "/arm/joint_states": JOINT_VECTOR_SCHEMA,
    "/arm/pose_command": ARM_POSE_SCHEMA,
    "/arm/pose": ARM_POSE_SCHEMA,
    "/base/cmd_vel": VELOCITY_COMMAND_SCHEMA,
    "/base/odom": BASE_POSE_SCHEMA,
    "/safety/estop": ESTOP_SCHEMA,
}

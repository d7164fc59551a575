"""Shared domain types and geometric helpers.

Internal units are SI throughout: radians, meters, seconds. Degrees only
appear at parse and display boundaries. All types are immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

from .errors import InvalidCommand, NotNormalizable

JOINT_NAMES: Tuple[str, ...] = (
    "right_j0",
    "right_j1",
    "right_j2",
    "right_j3",
    "right_j4",
    "right_j5",
    "right_j6",
)

# tolerance for accepting a backend-supplied quaternion as "meant to be unit"
QUAT_ACCEPT_TOL = 0.01
QUAT_NORM_TOL = 1e-6


def wrap_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]; -pi maps to +pi by convention."""
    if not math.isfinite(theta):
        raise InvalidCommand(f"angle not finite: {theta!r}")
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


def deg_to_rad(d: float) -> float:
    return d * math.pi / 180.0


def rad_to_deg(r: float) -> float:
    return r * 180.0 / math.pi


def normalize_quaternion(q: Tuple[float, float, float, float]) -> Tuple[float, float, float, float]:
    """Rescale a near-unit quaternion to unit norm.

    Raises NotNormalizable when the norm is zero or off by >= 0.01 --
    that signals an invalid action from a backend, not a rounding issue.
    """
    x, y, z, w = q
    norm = math.sqrt(x * x + y * y + z * z + w * w)
    if norm <= 0.0 or abs(norm - 1.0) >= QUAT_ACCEPT_TOL:
        raise NotNormalizable(f"quaternion norm {norm:.6f} not within {QUAT_ACCEPT_TOL} of 1")
    return (x / norm, y / norm, z / norm, w / norm)


@dataclass(frozen=True)
class JointVector:
    """Angles for the 7 arm joints, radians, keyed right_j0..right_j6."""

    angles: Mapping[str, float]

    def __post_init__(self):
        names = set(self.angles)
        expected = set(JOINT_NAMES)
        if names != expected:
            missing = expected - names
            extra = names - expected
            raise InvalidCommand(
                f"joint map must contain exactly {JOINT_NAMES}; missing={sorted(missing)} extra={sorted(extra)}"
            )
        for name, angle in self.angles.items():
            if not isinstance(angle, (int, float)) or isinstance(angle, bool) or not math.isfinite(angle):
                raise InvalidCommand(f"joint {name} angle not finite: {angle!r}")
        object.__setattr__(self, "angles", dict(self.angles))

    def __getitem__(self, name: str) -> float:
        return self.angles[name]

    @classmethod
    def zeros(cls) -> "JointVector":
        return cls({name: 0.0 for name in JOINT_NAMES})

    def with_joint(self, name: str, angle: float) -> "JointVector":
        updated = dict(self.angles)
        updated[name] = angle
        return JointVector(updated)

    def to_json(self) -> Dict[str, float]:
        return {name: float(self.angles[name]) for name in JOINT_NAMES}

    @classmethod
    def from_json(cls, obj: Mapping[str, float]) -> "JointVector":
        return cls(dict(obj))


@dataclass(frozen=True)
class JointLimits:
    """Per-joint (min_rad, max_rad) bounds, covering all 7 joints."""

    limits: Mapping[str, Tuple[float, float]]

    def __post_init__(self):
        if set(self.limits) != set(JOINT_NAMES):
            raise InvalidCommand("joint limits must cover exactly the 7 joints")
        for name, (lo, hi) in self.limits.items():
            if not (lo < hi):
                raise InvalidCommand(f"joint {name}: min {lo} must be < max {hi}")
        object.__setattr__(self, "limits", {k: (float(v[0]), float(v[1])) for k, v in self.limits.items()})

    def __getitem__(self, name: str) -> Tuple[float, float]:
        return self.limits[name]

    @classmethod
    def symmetric(cls, bound: float = 3.0503) -> "JointLimits":
        return cls({name: (-bound, bound) for name in JOINT_NAMES})

    def to_json(self) -> Dict[str, list]:
        return {name: list(self.limits[name]) for name in JOINT_NAMES}


@dataclass(frozen=True)
class ArmPose:
    """End-effector position (meters) plus unit-quaternion orientation."""

    position_x: float
    position_y: float
    position_z: float
    orientation: Tuple[float, float, float, float] = (0.0, 0.0, 0.0, 1.0)

    def __post_init__(self):
        for v in (self.position_x, self.position_y, self.position_z):
            if not math.isfinite(v):
                raise InvalidCommand(f"pose position not finite: {v!r}")
        object.__setattr__(self, "orientation", normalize_quaternion(tuple(self.orientation)))

    def distance_to(self, other: "ArmPose") -> float:
        return math.sqrt(
            (self.position_x - other.position_x) ** 2
            + (self.position_y - other.position_y) ** 2
            + (self.position_z - other.position_z) ** 2
        )

    def to_json(self) -> Dict[str, float]:
        ox, oy, oz, ow = self.orientation
        return {
            "position_x": self.position_x,
            "position_y": self.position_y,
            "position_z": self.position_z,
            "orientation_x": ox,
            "orientation_y": oy,
            "orientation_z": oz,
            "orientation_w": ow,
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, float]) -> "ArmPose":
        return cls(
            position_x=obj["position_x"],
            position_y=obj["position_y"],
            position_z=obj["position_z"],
            orientation=(
                obj.get("orientation_x", 0.0),
                obj.get("orientation_y", 0.0),
                obj.get("orientation_z", 0.0),
                obj.get("orientation_w", 1.0),
            ),
        )


@dataclass(frozen=True)
class BasePose2D:
    """Planar pose: x, y in meters, heading theta wrapped to (-pi, pi]."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        for v in (self.x, self.y):
            if not math.isfinite(v):
                raise InvalidCommand(f"base pose field not finite: {v!r}")
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    def to_json(self) -> Dict[str, float]:
        return {"x": self.x, "y": self.y, "theta": self.theta}

    @classmethod
    def from_json(cls, obj: Mapping[str, float]) -> "BasePose2D":
        return cls(x=obj["x"], y=obj["y"], theta=obj["theta"])


@dataclass(frozen=True)
class VelocityCommand:
    """Forward speed, yaw rate (radians/second internally) and duration.

    Prompts and Table II report the yaw rate in degrees/second; convert
    at the boundary, never store degrees here.
    """

    v_x: float
    omega: float
    duration: float

    def __post_init__(self):
        for v in (self.v_x, self.omega, self.duration):
            if not math.isfinite(v):
                raise InvalidCommand(f"velocity field not finite: {v!r}")
        if self.duration < 0:
            raise InvalidCommand(f"duration must be >= 0, got {self.duration}")

    def to_json(self) -> Dict[str, float]:
        return {"v_x": self.v_x, "omega": self.omega, "duration": self.duration}

    @classmethod
    def from_json(cls, obj: Mapping[str, float]) -> "VelocityCommand":
        return cls(v_x=obj["v_x"], omega=obj["omega"], duration=obj["duration"])

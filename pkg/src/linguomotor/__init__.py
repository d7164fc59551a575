"""Language-to-robot control gateway with deterministic simulators."""

from .granularity import GranularityLabel, Quantity, classify_granularity
from .kinematics import COMPILED, integrate_unicycle, integrate_unicycle_euler
from .model import (
    ArmPose,
    BasePose2D,
    JointLimits,
    JointVector,
    VelocityCommand,
    deg_to_rad,
    normalize_quaternion,
    rad_to_deg,
    wrap_angle,
)
from .sim import ArmSim, BaseSim, SimConfig, World, clamp_joints
from .tools import ToolCall, ToolSchema

__version__ = "0.1.0"

__all__ = [
    "ArmPose",
    "ArmSim",
    "BasePose2D",
    "BaseSim",
    "COMPILED",
    "GranularityLabel",
    "JointLimits",
    "JointVector",
    "Quantity",
    "SimConfig",
    "ToolCall",
    "ToolSchema",
    "VelocityCommand",
    "World",
    "clamp_joints",
    "classify_granularity",
    "deg_to_rad",
    "integrate_unicycle",
    "integrate_unicycle_euler",
    "normalize_quaternion",
    "rad_to_deg",
    "wrap_angle",
]

"""Deterministic desk-scale robot simulators driven by a shared tick clock.

Achieved state equals the clamped commanded target exactly: hardware
residuals (gravity sag, wheel slip) are deliberately not modeled so the
sims stay a pure function of (initial state, command sequence, ticks).
"""

from __future__ import annotations

import math
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, Optional, Tuple

from . import schemas
from .bus import Bus
from .errors import EStopEngaged, InvalidCommand, OutOfWorkspace
from .kinematics import integrate_unicycle
from .model import (
    JOINT_NAMES,
    ArmPose,
    BasePose2D,
    JointLimits,
    JointVector,
    VelocityCommand,
    rad_to_deg,
)


@dataclass(frozen=True)
class SimConfig:
    tick_hz: float = 100.0
    joint_speed_max: float = 0.5       # rad/s per joint
    pose_speed_max: float = 0.2        # m/s linear end-effector motion
    workspace_radius: float = 1.26     # meters, sphere centered at the base
    joint_limits: JointLimits = field(default_factory=JointLimits.symmetric)

    def __post_init__(self):
        for name in ("tick_hz", "joint_speed_max", "pose_speed_max", "workspace_radius"):
            if getattr(self, name) <= 0:
                raise InvalidCommand(f"SimConfig.{name} must be positive")

    @property
    def dt(self) -> float:
        return 1.0 / self.tick_hz


def clamp_joints(target: JointVector, limits: JointLimits) -> JointVector:
    clamped = {}
    for name in JOINT_NAMES:
        lo, hi = limits[name]
        clamped[name] = min(max(target[name], lo), hi)
    return JointVector(clamped)


class ArmSim:
    """Sawyer-like 7-joint arm: rate-limited joint mode plus direct pose mode.

    Commands queue FIFO; each runs to completion before the next starts.
    E-stop (set by the owning world) halts in-flight motion immediately.
    """

    def __init__(self, bus: Bus, config: SimConfig):
        self._bus = bus
        self._config = config
        self.joints = JointVector.zeros()
        self.pose = ArmPose(0.0, 0.0, 0.0)
        self._queue: Deque[Tuple[str, object]] = deque()
        self._joint_target: Optional[JointVector] = None
        self._pose_target: Optional[ArmPose] = None
        self._pose_start: Optional[ArmPose] = None
        self._pose_elapsed = 0.0
        self.estopped = False

    @property
    def moving(self) -> bool:
        return self._joint_target is not None or self._pose_target is not None

    @property
    def idle(self) -> bool:
        return not self.moving and not self._queue

    def reset(self, joints: Optional[JointVector] = None, pose: Optional[ArmPose] = None) -> None:
        self._queue.clear()
        self._joint_target = None
        self._pose_target = None
        if joints is not None:
            self.joints = clamp_joints(joints, self._config.joint_limits)
        if pose is not None:
            self.pose = pose
        self._publish_joints()
        self._publish_pose()

    def command_joints(self, target: JointVector) -> None:
        if self.estopped:
            raise EStopEngaged("arm joint command rejected")
        self._queue.append(("joints", clamp_joints(target, self._config.joint_limits)))

    def command_pose(self, target: ArmPose) -> None:
        if self.estopped:
            raise EStopEngaged("arm pose command rejected")
        r = math.sqrt(target.position_x ** 2 + target.position_y ** 2 + target.position_z ** 2)
        if r > self._config.workspace_radius:
            raise OutOfWorkspace(
                f"target at {r:.3f} m exceeds workspace radius {self._config.workspace_radius} m"
            )
        self._queue.append(("pose", target))

    def halt(self) -> None:
        """Freeze at the state already reached; drop queued commands."""
        self._queue.clear()
        self._joint_target = None
        self._pose_target = None

    def tick(self, dt: float) -> None:
        if not self.moving and self._queue:
            kind, target = self._queue.popleft()
            if kind == "joints":
                self._joint_target = target
            else:
                self._pose_target = target
                self._pose_start = self.pose
                self._pose_elapsed = 0.0
        if self._joint_target is not None:
            self._tick_joints(dt)
        elif self._pose_target is not None:
            self._tick_pose(dt)

    def _tick_joints(self, dt: float) -> None:
        target = self._joint_target
        max_step = self._config.joint_speed_max * dt
        updated = {}
        done = True
        for name in JOINT_NAMES:
            cur, goal = self.joints[name], target[name]
            delta = goal - cur
            if abs(delta) <= max_step:
                updated[name] = goal
            else:
                updated[name] = cur + math.copysign(max_step, delta)
                done = False
        self.joints = JointVector(updated)
        if done:
            self._joint_target = None
        self._publish_joints()

    def _tick_pose(self, dt: float) -> None:
        target, start = self._pose_target, self._pose_start
        self._pose_elapsed += dt
        total = start.distance_to(target)
        travelled = self._pose_speed() * self._pose_elapsed
        if travelled >= total:
            self.pose = target
            self._pose_target = None
        else:
            frac = travelled / total
            self.pose = ArmPose(
                position_x=start.position_x + frac * (target.position_x - start.position_x),
                position_y=start.position_y + frac * (target.position_y - start.position_y),
                position_z=start.position_z + frac * (target.position_z - start.position_z),
                orientation=start.orientation,
            )
        self._publish_pose()

    def _pose_speed(self) -> float:
        return self._config.pose_speed_max

    def _publish_joints(self) -> None:
        self._bus.publish("/arm/joint_states", self.joints.to_json())

    def _publish_pose(self) -> None:
        self._bus.publish("/arm/pose", self.pose.to_json())


class BaseSim:
    """TurtleBot-like differential-drive base, unicycle kinematics.

    Each velocity command executes for its full duration; the final pose
    is the single-shot closed-form integral from the segment start, so
    finishing is bit-exact regardless of tick size.
    """

    def __init__(self, bus: Bus, config: SimConfig):
        self._bus = bus
        self._config = config
        self.pose = BasePose2D(0.0, 0.0, 0.0)
        self._queue: Deque[VelocityCommand] = deque()
        self.active_command: Optional[VelocityCommand] = None
        self.command_elapsed = 0.0
        self._segment_start: Optional[BasePose2D] = None
        self.estopped = False

    @property
    def moving(self) -> bool:
        return self.active_command is not None

    @property
    def idle(self) -> bool:
        return not self.moving and not self._queue

    def reset(self, pose: BasePose2D) -> None:
        self._queue.clear()
        self.active_command = None
        self.pose = pose
        self._publish_odom()

    def command_velocity(self, cmd: VelocityCommand) -> None:
        if self.estopped:
            raise EStopEngaged("base velocity command rejected")
        self._queue.append(cmd)

    def halt(self) -> None:
        self._queue.clear()
        self.active_command = None

    def tick(self, dt: float) -> None:
        if self.active_command is None and self._queue:
            self.active_command = self._queue.popleft()
            self.command_elapsed = 0.0
            self._segment_start = self.pose
        cmd = self.active_command
        if cmd is None:
            return
        self.command_elapsed = min(self.command_elapsed + dt, cmd.duration)
        if self.command_elapsed >= cmd.duration:
            self.pose = integrate_unicycle(self._segment_start, cmd)
            self.active_command = None
        else:
            partial = VelocityCommand(cmd.v_x, cmd.omega, self.command_elapsed)
            self.pose = integrate_unicycle(self._segment_start, partial)
        self._publish_odom()

    def _publish_odom(self) -> None:
        payload = self.pose.to_json()
        payload["theta_deg"] = rad_to_deg(self.pose.theta)
        self._bus.publish("/base/odom", payload)


class World:
    """Composition of the bus, simulators, shared clock, and e-stop.

    Simulators consume command topics and publish state topics; tick()
    is the only way time advances. E-stop is the one preemptive input
    and may be engaged from any thread.
    """

    def __init__(self, config: Optional[SimConfig] = None, bus: Optional[Bus] = None,
                 robots: Tuple[str, ...] = ("arm", "base")):
        self.config = config or SimConfig()
        self.bus = bus or Bus()
        self._lock = threading.RLock()
        self.sim_time = 0.0
        for topic, schema in schemas.TOPIC_SCHEMAS.items():
            self.bus.advertise(topic, schema)
        self.arm = ArmSim(self.bus, self.config) if "arm" in robots else None
        self.base = BaseSim(self.bus, self.config) if "base" in robots else None
        self.estopped = False
        if self.arm is not None:
            self.bus.subscribe("/arm/joint_command", self._on_joint_command)
            self.bus.subscribe("/arm/pose_command", self._on_pose_command)
        if self.base is not None:
            self.bus.subscribe("/base/cmd_vel", self._on_cmd_vel)
        self.bus.subscribe("/safety/estop", self._on_estop)

    def _on_joint_command(self, msg) -> None:
        with self._lock:
            self.arm.command_joints(JointVector.from_json(msg.payload))

    def _on_pose_command(self, msg) -> None:
        with self._lock:
            self.arm.command_pose(ArmPose.from_json(msg.payload))

    def _on_cmd_vel(self, msg) -> None:
        with self._lock:
            self.base.command_velocity(VelocityCommand.from_json(msg.payload))

    def _on_estop(self, msg) -> None:
        with self._lock:
            engaged = bool(msg.payload["engaged"])
            self.estopped = engaged
            for sim in (self.arm, self.base):
                if sim is not None:
                    sim.estopped = engaged
                    if engaged:
                        sim.halt()

    def engage_estop(self) -> None:
        self.bus.publish("/safety/estop", {"engaged": True})

    def reset_estop(self) -> None:
        self.bus.publish("/safety/estop", {"engaged": False})

    @property
    def idle(self) -> bool:
        with self._lock:
            sims = [s for s in (self.arm, self.base) if s is not None]
            return all(s.idle for s in sims)

    def tick(self, n: int = 1) -> None:
        if n < 0:
            raise InvalidCommand("tick count must be >= 0")
        dt = self.config.dt
        with self._lock:
            for _ in range(n):
                self.sim_time += dt
                if self.estopped:
                    continue
                if self.arm is not None:
                    self.arm.tick(dt)
                if self.base is not None:
                    self.base.tick(dt)

    def run_until_idle(self, max_ticks: int = 1_000_000) -> int:
        """Advance virtual time until all motion completes; returns ticks used."""
        ticks = 0
        while not self.idle and ticks < max_ticks:
            self.tick(1)
            ticks += 1
            if self.estopped:
                break
        return ticks

    def state_snapshot(self) -> Dict:
        with self._lock:
            snap: Dict = {"estop": self.estopped}
            if self.arm is not None:
                snap["arm"] = {
                    "joints": self.arm.joints.to_json(),
                    "pose": self.arm.pose.to_json(),
                    "moving": self.arm.moving,
                }
            if self.base is not None:
                snap["base"] = {
                    "x": self.base.pose.x,
                    "y": self.base.pose.y,
                    "theta": self.base.pose.theta,
                    "theta_deg": rad_to_deg(self.base.pose.theta),
                    "moving": self.base.moving,
                }
            return snap

"""Unicycle kinematics with a compiled core and pure-Python fallback.

The closed-form integrator is the production path used by the base
simulator; the fixed-step Euler integrator exists as an independent
cross-check (and is what the oracle tests and benchmarks exercise).
"""

from __future__ import annotations

from .errors import InvalidCommand
from .model import BasePose2D, VelocityCommand

try:
    from . import _speedups as _impl

    COMPILED = True
except ImportError:  # extension not built; numpy fallback
    from . import _kinematics_py as _impl

    COMPILED = False

unicycle_step = _impl.unicycle_step
euler_final = _impl.euler_final


def integrate_unicycle(start: BasePose2D, cmd: VelocityCommand) -> BasePose2D:
    """Advance a planar pose by a velocity command, closed form."""
    if cmd.duration < 0:
        raise InvalidCommand("duration must be >= 0")
    x, y, theta = unicycle_step(start.x, start.y, start.theta, cmd.v_x, cmd.omega, cmd.duration)
    return BasePose2D(x=x, y=y, theta=theta)


def integrate_unicycle_euler(start: BasePose2D, cmd: VelocityCommand, dt: float = 1e-4) -> BasePose2D:
    """Fixed-step Euler reference for the same motion."""
    x, y, theta = euler_final(start.x, start.y, start.theta, cmd.v_x, cmd.omega, cmd.duration, dt)
    return BasePose2D(x=x, y=y, theta=theta)

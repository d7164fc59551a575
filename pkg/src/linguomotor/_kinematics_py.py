"""Pure-Python/numpy unicycle kernels, fallback for the compiled core."""

from __future__ import annotations

import math

import numpy as np

from .model import wrap_angle


def unicycle_step(x: float, y: float, theta: float, v: float, omega: float, t: float):
    """Closed-form unicycle displacement over a time interval."""
    # chord form: displacement = v*t*sinc(omega*t/2) along the mid-arc
    # heading; stable as omega -> 0 where v/omega would blow up
    half = 0.5 * omega * t
    if abs(half) < 1e-4:
        sinc = 1.0 - half * half / 6.0
    else:
        sinc = math.sin(half) / half
    chord = v * t * sinc
    nx = x + chord * math.cos(theta + half)
    ny = y + chord * math.sin(theta + half)
    return nx, ny, wrap_angle(theta + omega * t)


def euler_final(x: float, y: float, theta: float, v: float, omega: float, t: float, dt: float):
    """Explicit fixed-step Euler integration of the same motion.

    The heading under constant omega is linear in the step index, so the
    Euler sum vectorizes as a cosine/sine sum without changing the scheme.
    """
    n = int(t / dt)
    if n > 0:
        headings = theta + omega * dt * np.arange(n, dtype=np.float64)
        x += v * dt * float(np.cos(headings).sum())
        y += v * dt * float(np.sin(headings).sum())
        theta += omega * dt * n
    rem = t - n * dt
    if rem > 0.0:
        x += v * math.cos(theta) * rem
        y += v * math.sin(theta) * rem
        theta += omega * rem
    return x, y, wrap_angle(theta)

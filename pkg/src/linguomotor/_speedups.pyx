# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled unicycle kinematics kernels.

Same contract as linguomotor._kinematics_py; selected at import by
linguomotor.kinematics when the extension built successfully.
"""

from libc.math cimport sin, cos, fmod, M_PI


cdef inline double _wrap(double theta):
    cdef double w = fmod(theta + M_PI, 2.0 * M_PI)
    if w <= 0.0:
        w += 2.0 * M_PI
    return w - M_PI


def unicycle_step(double x, double y, double theta, double v, double omega, double t):
    """Closed-form unicycle displacement over a time interval."""
    # chord form: displacement = v*t*sinc(omega*t/2) along the mid-arc
    # heading; stable as omega -> 0 where v/omega would blow up
    cdef double half = 0.5 * omega * t
    cdef double sinc, chord
    if half < 1e-4 and half > -1e-4:
        sinc = 1.0 - half * half / 6.0
    else:
        sinc = sin(half) / half
    chord = v * t * sinc
    return (x + chord * cos(theta + half),
            y + chord * sin(theta + half),
            _wrap(theta + omega * t))


def euler_final(double x, double y, double theta, double v, double omega,
                double t, double dt):
    """Explicit fixed-step Euler integration of the same motion."""
    cdef long n = <long> (t / dt)
    cdef long k
    cdef double th = theta
    for k in range(n):
        x += v * cos(th) * dt
        y += v * sin(th) * dt
        th += omega * dt
    cdef double rem = t - n * dt
    if rem > 0.0:
        x += v * cos(th) * rem
        y += v * sin(th) * rem
        th += omega * rem
    return x, y, _wrap(th)

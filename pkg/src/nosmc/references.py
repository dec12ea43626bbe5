"""Named, serialisable reference signals.

Each builder takes plain numbers so a scenario file can describe its
reference as ``{"kind": ..., **params}``.
"""
from __future__ import annotations

import numpy as np

from .control import Reference, Segment


def _quintic(s):
    """Smoothstep with zero first and second derivatives at both ends: (q, q', q'')."""
    s = np.clip(s, 0.0, 1.0)
    q = s ** 3 * (10 - 15 * s + 6 * s * s)
    dq = 30 * s * s * (1 - s) ** 2
    ddq = 60 * s * (1 - s) * (1 - 2 * s)
    return q, dq, ddq


def _ramp_integral(s):
    """Integral of the quintic smoothstep, continued linearly past s = 1."""
    s = np.asarray(s, dtype=float)
    c = np.clip(s, 0.0, 1.0)
    inner = 2.5 * c ** 4 - 3 * c ** 5 + c ** 6
    return inner + np.maximum(s - 1.0, 0.0)


def constant(value=0.0):
    return Reference.constant(float(value))


def sine(offset=0.0, amp=1.0, w=1.0, phase=0.0):
    return Reference.smooth(
        lambda t: offset + amp * np.sin(w * t + phase),
        lambda t: amp * w * np.cos(w * t + phase),
        lambda t: -amp * w * w * np.sin(w * t + phase),
        Lx=abs(amp) * w * w,
    )


def steps(levels):
    """Piecewise-constant reference from ``[[t0, level0], [t1, level1], ...]``."""
    segs = [Segment.hold(float(t), float(v)) for t, v in levels]
    return Reference(segs, Lx=0.0)


def _blend(start, t0, duration, target):
    """Hold ``start`` then glide to ``target`` over [t0, t0 + duration]."""
    span = target - start

    def val(t):
        return start + span * _quintic((t - t0) / duration)[0]

    def d1(t):
        return span / duration * _quintic((t - t0) / duration)[1]

    def d2(t):
        return span / duration ** 2 * _quintic((t - t0) / duration)[2]

    return val, d1, d2


def mission(axis, hover=(0.0, 0.0, 1.0), line_start=3.0, line_duration=3.0, line_dx=-1.5,
            circle_start=6.0, radius=5.0, omega=0.3, ramp=4.0, z_circle=2.5):
    """Hover, straight glide along x, then a circle entered at ``circle_start``.

    The circle starts where the glide ends with zero velocity and its angular
    rate ramps up smoothly, so x and y stay twice differentiable across the
    switch.  Altitude steps from the hover height to ``z_circle`` at the same
    instant, which is the reference jump of the mission.
    """
    x0, y0, z0 = hover
    if axis == "z":
        return Reference([Segment.hold(0.0, z0), Segment.hold(circle_start, z_circle)], Lx=0.0)

    xe = x0 + line_dx
    cx = xe + radius  # centre to the +x side; the path starts at angle pi

    def ang(t):
        s = (np.asarray(t, dtype=float) - circle_start) / ramp
        a = omega * ramp * _ramp_integral(s)
        q, dq, _ = _quintic(s)
        a1 = omega * np.where(s >= 1.0, 1.0, q)
        a2 = np.where(s >= 1.0, 0.0, omega / ramp * dq)
        return a, a1, a2

    if axis == "x":
        glide = _blend(x0, line_start, line_duration, xe)

        def cv(t):
            return cx - radius * np.cos(ang(t)[0])

        def cd1(t):
            a, a1, _ = ang(t)
            return radius * np.sin(a) * a1

        def cd2(t):
            a, a1, a2 = ang(t)
            return radius * (np.cos(a) * a1 * a1 + np.sin(a) * a2)

        circ = (cv, cd1, cd2)
    elif axis == "y":
        glide = (lambda t: y0 + 0.0 * np.asarray(t, dtype=float),) + (lambda t: 0.0 * np.asarray(t, dtype=float),) * 2

        def cv(t):
            return y0 - radius * np.sin(ang(t)[0])

        def cd1(t):
            a, a1, _ = ang(t)
            return -radius * np.cos(a) * a1

        def cd2(t):
            a, a1, a2 = ang(t)
            return radius * (np.sin(a) * a1 * a1 - np.cos(a) * a2)

        circ = (cv, cd1, cd2)
    else:
        raise ValueError(f"unknown axis {axis!r}")
    return Reference([Segment(0.0, *glide), Segment(circle_start, *circ)])


BUILDERS = {"constant": constant, "sine": sine, "steps": steps}


def build(spec: dict) -> Reference:
    """Reference from ``{"kind": name, **params}``."""
    spec = dict(spec)
    kind = spec.pop("kind")
    if kind not in BUILDERS:
        raise ValueError(f"unknown reference kind {kind!r}")
    return BUILDERS[kind](**spec)

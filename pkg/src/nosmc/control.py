"""Feedback laws built from desired error dynamics, plus PID/PI baselines.

Error convention throughout: ``e1 = xd - x1`` and ``e2 = xd' - x2``.  With
``u = v - h`` the closed loop of ``x2' = h + u - delta`` becomes
``e2' = -v + xd'' + delta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .gains import GainConfig, GainSet, SwitchErrors, determine_gains
from .sliding import ErrorState, ideal_law, smooth_law

REACHING = "reaching"
SLIDING = "sliding"


def _const(c):
    return lambda t: np.full(np.shape(t), float(c))


@dataclass(frozen=True)
class Segment:
    """One smooth piece of a reference: value and its first two derivatives."""

    start: float
    value: Callable
    d1: Callable
    d2: Callable

    @classmethod
    def hold(cls, start, level):
        return cls(start, _const(level), _const(0.0), _const(0.0))


@dataclass(frozen=True)
class Reference:
    """Piecewise-smooth reference; every boundary after the first segment is a jump time."""

    segments: Sequence[Segment]
    Lx: float | None = None

    def __post_init__(self):
        starts = [s.start for s in self.segments]
        if not starts or starts != sorted(starts) or len(set(starts)) != len(starts):
            raise ValueError("segments must have strictly increasing start times")

    @classmethod
    def constant(cls, level):
        return cls([Segment.hold(0.0, level)], Lx=0.0)

    @classmethod
    def smooth(cls, value, d1, d2, Lx=None):
        return cls([Segment(0.0, value, d1, d2)], Lx=Lx)

    @property
    def jump_times(self):
        return [s.start for s in self.segments[1:]]

    def _index(self, t):
        starts = np.array([s.start for s in self.segments])
        return np.clip(np.searchsorted(starts, t, side="right") - 1, 0, None)

    def sample(self, t):
        """(xd, xd', xd'') at scalar or array ``t``; a jump instant belongs to the new piece."""
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if len(self.segments) == 1:
            seg = self.segments[0]
            out = np.broadcast_arrays(seg.value(t), seg.d1(t), seg.d2(t))
            if scalar:
                return tuple(float(v[0]) for v in out)
            return tuple(np.array(v, dtype=float) for v in out)
        idx = self._index(t)
        out = np.zeros((3, t.size))
        for k, seg in enumerate(self.segments):
            m = idx == k
            if m.any():
                tm = t[m]
                out[0, m] = seg.value(tm)
                out[1, m] = seg.d1(tm)
                out[2, m] = seg.d2(tm)
        if scalar:
            return tuple(float(v[0]) for v in out)
        return out[0], out[1], out[2]

    def jump(self, tj):
        """(delta xd, delta xd') across the boundary at ``tj``."""
        k = self.jump_times.index(tj) + 1
        old, new = self.segments[k - 1], self.segments[k]
        return float(new.value(tj) - old.value(tj)), float(new.d1(tj) - old.d1(tj))

    def sup_d2(self, t_end, n=20001):
        if self.Lx is not None:
            return self.Lx
        return float(np.max(np.abs(self.sample(np.linspace(0.0, t_end, n))[2])))


@dataclass(frozen=True)
class PidGains:
    kp: float
    ki: float
    kd: float = 0.0


@dataclass(frozen=True)
class ControllerState:
    mode: str
    gains: GainSet
    tc_event: float | None = None
    integral: float = 0.0

    def replace(self, **kw):
        return replace(self, **kw)


def ideal_control(e: ErrorState, g: GainSet, h):
    """u = v - h with v the discontinuous switching term."""
    return ideal_law(e.e1, e.e2, g) - h


def smooth_control(e: ErrorState, g: GainSet, h):
    return smooth_law(e.e1, e.e2, g) - h


def enter_sliding(cs: ControllerState, e: ErrorState, config: GainConfig, t, smooth=True):
    """Freeze new terminal gains from the errors observed at the switch instant."""
    g = determine_gains(SwitchErrors(e.e1, e.e2), cs.gains.reach, config,
                        smooth=smooth, previous=cs.gains if _complete(cs.gains) else None)
    return cs.replace(mode=SLIDING, gains=g, tc_event=t)


def _complete(g: GainSet):
    return g is not None and g.k1 > 0 and math.isfinite(g.k2) and g.k2 > 0


def on_reference_jump(cs: ControllerState, e: ErrorState, config: GainConfig, t=None, smooth=True):
    """Controller state right after a reference jump.

    Large post-jump errors restart the reaching phase; small ones become new
    switch errors and the terminal gains are redetermined on the spot.
    """
    if abs(e.e1) > cs.gains.e1c:
        return cs.replace(mode=REACHING, tc_event=None)
    return enter_sliding(cs, e, config, t, smooth=smooth)


def initial_state(reach, mode=REACHING):
    """Controller state before any switch: reaching parameters only."""
    g = GainSet.from_parts(reach, k1=0.0, k2=0.0, rho=None)
    return ControllerState(mode=mode, gains=g)


def pid_control(e, e_dot, integral, pg: PidGains, g_term):
    return pg.kp * e + pg.ki * integral + pg.kd * e_dot - g_term


def pi_control(e, integral, kp, ki, g_term):
    return kp * e + ki * integral - g_term


def pid_stable(kp, ki, kd=0.0, order=3):
    """Hurwitz test of s^3 + kd s^2 + kp s + ki (order 3) or s^2 + kp s + ki (order 2)."""
    if order == 3:
        return kd > 0 and ki > 0 and kd * kp > ki
    if order == 2:
        return kp > 0 and ki > 0
    raise ValueError(f"order must be 2 or 3, got {order}")


@dataclass(frozen=True)
class ControllerSpec:
    """What the simulator should close the loop with.

    ``kind`` is one of ideal, smooth, pid, pi.  ``schedule`` adapts the
    reaching parameters to the initial errors before the run (``horizon``
    bounds how long a diverging initial velocity may take to reverse).
    ``rho``, when set, replaces the computed terminal steepness.
    """

    kind: str = "smooth"
    config: GainConfig | None = None
    kc: float | None = None
    e1c: float | None = None
    e2c: float | None = None
    pid: PidGains | None = None
    schedule: bool = False
    horizon: float | None = None
    rho: float | None = None

    KINDS = ("ideal", "smooth", "pid", "pi")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown controller kind {self.kind!r}")
        if self.kind in ("ideal", "smooth") and (self.config is None or self.kc is None):
            raise ValueError("sliding controllers need a GainConfig and kc")
        if self.kind in ("pid", "pi") and self.pid is None:
            raise ValueError("PID/PI controllers need PidGains")

    @property
    def smooth(self):
        return self.kind == "smooth"

    def with_kind(self, kind, pid=None):
        return replace(self, kind=kind, pid=pid or self.pid)


__all__ = [
    "REACHING", "SLIDING", "Segment", "Reference", "PidGains", "ControllerState",
    "ControllerSpec", "ideal_control", "smooth_control", "enter_sliding", "on_reference_jump",
    "initial_state", "pid_control", "pi_control", "pid_stable",
]

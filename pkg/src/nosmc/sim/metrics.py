"""Metrics over traces: overshoot, settling time, steady-state bands, chattering."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import MissingEvent
from ..gains import SwitchErrors
from ..sliding import settling_time
from .trace import Trace


@dataclass(frozen=True)
class Overshoot:
    """``none`` is True when no crossing was found; otherwise the first crossing."""

    none: bool
    t: float | None = None
    index: int | None = None
    magnitude: float = 0.0

    def __bool__(self):
        # truthy means "overshoot happened"
        return not self.none

    def __str__(self):
        if self.none:
            return "none"
        return f"crossing at t={self.t:.6g} (depth {self.magnitude:.3g})"


def _segments(n, t, breaks):
    """Index ranges [a, b) split at the given break times."""
    cuts = [0]
    for tb in sorted(breaks):
        i = int(np.searchsorted(t, tb, side="left"))
        if 0 < i < n and i != cuts[-1]:
            cuts.append(i)
    cuts.append(n)
    return list(zip(cuts[:-1], cuts[1:]))


def detect_overshoot(trace, channel=None, tolerance=None, breaks=None):
    """Look for e1 crossing to the far side of zero.

    Accepts a :class:`Trace`, a UAV trace plus ``channel``, or a plain
    sequence of e1 samples.  Each segment between reference jumps is judged
    against its own starting sign with ``eps = tol * max(1, |e1(start)|)``.
    """
    if channel is not None:
        trace = trace.channels[channel]
    if isinstance(trace, Trace):
        e1, t = np.asarray(trace.e1), np.asarray(trace.t)
        tol = trace.meta.get("event_tolerance", 1e-3) if tolerance is None else tolerance
        if breaks is None:
            breaks = [e.t for e in trace.events_of("refJump")]
    else:
        e1 = np.asarray(trace, dtype=float)
        t = np.arange(e1.size, dtype=float)
        tol = 1e-3 if tolerance is None else tolerance
        breaks = breaks or []
    for a, b in _segments(e1.size, t, breaks):
        s0 = np.sign(e1[a])
        if s0 == 0:
            continue
        eps = tol * max(1.0, abs(e1[a]))
        signed = e1[a:b] * s0
        bad = np.flatnonzero(signed < -eps)
        if bad.size:
            i = a + int(bad[0])
            depth = float(-np.min(signed))
            return Overshoot(False, float(t[i]), i, depth)
    return Overshoot(True)


def measure_settling(trace: Trace, g=None, k2bar=None, Ld=None):
    """Surface-hit delay after tc against the closed-form settling time.

    ``k2bar`` defaults to the worst case ``k2 - Ld``.  Returns
    ``(ts_measured, ts_analytic, rel_error)``.
    """
    tc = trace.first("tc")
    hits = [e.t for e in trace.events_of("surfaceHit") if tc is not None and e.t >= tc]
    if tc is None or not hits:
        raise MissingEvent("trace lacks a tc or surfaceHit event")
    if g is None:
        g = trace.gains[0][1]
    ts_meas = hits[0] - tc
    i = int(np.searchsorted(trace.t, tc))
    e = SwitchErrors(float(trace.e1[i]), float(trace.e2[i]))
    if k2bar is None:
        Ld = trace.meta.get("Ld", 0.0) if Ld is None else Ld
        k2bar = g.k2 - Ld
    ts_an = settling_time(e, g.k1, k2bar)
    if ts_an == 0:
        return ts_meas, ts_an, abs(ts_meas)
    return ts_meas, ts_an, abs(ts_meas - ts_an) / ts_an


@dataclass(frozen=True)
class SteadyCheck:
    passed: bool
    sup_e1: float
    sup_e2: float
    slack1: float
    slack2: float


def tail(trace: Trace, fraction=0.2):
    n = len(trace.t)
    return max(0, int(n * (1 - fraction)))


def check_steady_bounds(trace: Trace, bounds, fraction=0.2):
    """Compare sup |e1|, sup |e2| over the final ``fraction`` of the run to (b1, b2)."""
    b1, b2 = bounds
    a = tail(trace, fraction)
    s1 = float(np.max(np.abs(trace.e1[a:])))
    s2 = float(np.max(np.abs(trace.e2[a:])))
    return SteadyCheck(s1 <= b1 and s2 <= b2, s1, s2, b1 - s1, b2 - s2)


def chattering_index(u, t):
    """Total variation of u per second."""
    u = np.asarray(u, dtype=float)
    span = float(t[-1] - t[0])
    return float(np.sum(np.abs(np.diff(u)))) / span if span > 0 else 0.0


@dataclass(frozen=True)
class MetricsReport:
    overshoot: Overshoot
    settling_time: float | None
    sse1: float
    sse2: float
    chattering: float

    def lines(self):
        st = "n/a" if self.settling_time is None else f"{self.settling_time:.6g}"
        return [
            f"overshoot: {self.overshoot}",
            f"settling time (surface hit - tc): {st}",
            f"sse1: {self.sse1:.6g}",
            f"sse2: {self.sse2:.6g}",
            f"chattering index: {self.chattering:.6g}",
        ]

    def as_row(self):
        return {
            "overshoot": "none" if self.overshoot.none else "yes",
            "overshoot_t": "" if self.overshoot.t is None else self.overshoot.t,
            "settling_time": "" if self.settling_time is None else self.settling_time,
            "sse1": self.sse1,
            "sse2": self.sse2,
            "chattering": self.chattering,
        }


def compute_metrics(trace: Trace, fraction=0.2):
    tc = trace.first("tc")
    hit = None
    if tc is not None:
        hits = [e.t for e in trace.events_of("surfaceHit") if e.t >= tc]
        hit = hits[0] - tc if hits else None
    a = tail(trace, fraction)
    return MetricsReport(
        overshoot=detect_overshoot(trace),
        settling_time=hit,
        sse1=float(np.max(np.abs(trace.e1[a:]))),
        sse2=float(np.max(np.abs(trace.e2[a:]))),
        chattering=chattering_index(trace.u, trace.t),
    )

"""Desired error dynamics (ideal and tanh-smoothed) and closed-form parabola oracles."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidContext, NoRealRoot
from .gains import GainSet, SwitchErrors, log_ratio


def sgn(x):
    """Sign with sgn(0) == 0."""
    return float(x > 0) - float(x < 0)


@dataclass(frozen=True)
class ErrorState:
    e1: float
    e2: float

    def sigma(self, k1):
        return self.e2 + k1 * self.e1

    def __neg__(self):
        return ErrorState(-self.e1, -self.e2)

    def as_switch(self):
        return SwitchErrors(self.e1, self.e2)


def ideal_law(e1, e2, g: GainSet):
    """Switching term v so that de2 = -v + d."""
    if abs(e1) > g.e1c:
        return g.kc * sgn(e2 + g.e2c * sgn(e1))
    return g.k2 * sgn(e2 + g.k1 * e1)


def smooth_law(e1, e2, g: GainSet):
    if abs(e1) > g.e1c:
        return g.kc * math.tanh(g.rho_c * (e2 + g.e2c * sgn(e1)))
    return g.k2 * math.tanh(g.rho * (e2 + g.k1 * e1))


def ideal_rhs(s: ErrorState, g: GainSet, d):
    return s.e2, -ideal_law(s.e1, s.e2, g) + d


def smooth_rhs(s: ErrorState, g: GainSet, d):
    return s.e2, -smooth_law(s.e1, s.e2, g) + d


@dataclass(frozen=True)
class ParabolaSegment:
    """Closed-form trajectory after tc under a constant effective gain k2bar.

    ``e1(t) = c1 + b1*tau + a1*tau^2`` and ``sigma(t) = c + b*tau + a*tau^2``
    with ``tau = t - t0``.  For sigma(tc) > 0 the accelerations flip sign.
    """

    a1: float
    b1: float
    c1: float
    a: float
    b: float
    c: float
    k2bar: float
    k1: float
    t0: float = 0.0

    @property
    def accel(self):
        return 2 * self.a1

    def e1(self, t):
        tau = t - self.t0
        return self.c1 + self.b1 * tau + self.a1 * tau * tau

    def e2(self, t):
        return self.b1 + self.accel * (t - self.t0)

    def sigma(self, t):
        tau = t - self.t0
        return self.c + self.b * tau + self.a * tau * tau

    def sigma_vertex(self):
        return (4 * self.a * self.c - self.b ** 2) / (4 * self.a)

    def e1_vertex(self):
        return (4 * self.a1 * self.c1 - self.b1 ** 2) / (4 * self.a1)


def parabola_from_switch(e: SwitchErrors, k1, k2bar, t0=0.0) -> ParabolaSegment:
    sigma = e.e2 + k1 * e.e1
    if sigma == 0:
        raise InvalidContext("sigma(tc) = 0: the trajectory already sits on the surface")
    s = -sgn(sigma)  # direction of the control-induced acceleration
    return ParabolaSegment(
        a1=s * k2bar / 2, b1=e.e2, c1=e.e1,
        a=s * k1 * k2bar / 2, b=s * k2bar + k1 * e.e2, c=sigma,
        k2bar=k2bar, k1=k1, t0=t0,
    )


def effective_gain(k2, d, sigma_tc):
    """k2bar for a constant disturbance: k2 - d*sign(sigma(tc))."""
    return k2 - d * sgn(sigma_tc)


def settling_time(e: SwitchErrors, k1, k2bar):
    """Time from tc until sigma first reaches zero along the parabola."""
    sigma = e.e2 + k1 * e.e1
    if sigma == 0:
        return 0.0
    if sigma > 0:
        e = -e
    q = e.e2 / k2bar
    rad = 1 / k1 ** 2 + q * q - 2 * e.e1 / k2bar
    if rad < 0:
        raise NoRealRoot(f"settling radicand {rad:.6g} < 0")
    return -(1 / k1 + q) + math.sqrt(rad)


def e1_zero_time(p: ParabolaSegment):
    """Earliest t >= t0 where the e1 parabola hits zero, or None."""
    a, b, c = p.a1, p.b1, p.c1
    if c == 0:
        return p.t0
    if a == 0:
        if b == 0:
            return None
        tau = -c / b
        return p.t0 + tau if tau >= 0 else None
    disc = b * b - 4 * a * c
    if disc < 0:
        return None
    r = math.sqrt(disc)
    # numerically stable pair of roots
    qq = -0.5 * (b + math.copysign(r, b))
    roots = [qq / a]
    if qq != 0:
        roots.append(c / qq)
    ok = [t for t in roots if t >= 0]
    return p.t0 + min(ok) if ok else None


def steady_state_bounds(g: GainSet, e2max, Ld):
    """Ultimate bounds (b1, b2) on |e1| and |e2| under the tanh law."""
    b1 = log_ratio(g.k1, g.k2, e2max, Ld) / (2 * g.rho * g.k1)
    return b1, 2 * g.k1 * b1

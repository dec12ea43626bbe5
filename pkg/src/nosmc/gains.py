"""Zone classification and parameter determination for the non-overshooting
second-order sliding mode.

The reaching subsystem is parametrised by ``(e1c, e2c, kc, rho_c)`` and the
terminal subsystem by ``(k1, k2, rho)``.  The terminal gains are computed from
the error pair ``(e1(tc), e2(tc))`` observed when ``|e1|`` first drops below
``e1c``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from .errors import (
    DegenerateErrors,
    GainCeilingExceeded,
    InfeasibleBounds,
    InvalidGain,
    SaturatedGain,
)

#: floor added to k2 when the switch errors are both zero
K2_EPS = 1e-6
#: floor for rho when the logarithm collapses to zero
RHO_MIN = 1.0


@dataclass(frozen=True)
class GainConfig:
    """Design knobs shared by every gain computation.

    ``Ld`` bounds the matched disturbance, ``k2M`` is the actuator ceiling
    for ``k2``.  The beta coefficients turn the open intervals on ``k1`` and
    ``k2`` into concrete values.
    """

    Ld: float
    k2M: float
    rho_c0: float = 50.0
    rho0: float = 20.0
    beta11: float = 0.5
    beta12: float = 2.3
    beta13: float = 1.0
    beta2: float = 1.5
    fast_k1_floor: bool = True

    def __post_init__(self):
        if not self.Ld >= 0:
            raise ValueError(f"Ld must be >= 0, got {self.Ld}")
        if not 0 < self.beta11 < 1:
            raise ValueError(f"beta11 must lie in (0, 1), got {self.beta11}")
        if not self.beta12 > 1:
            raise ValueError(f"beta12 must be > 1, got {self.beta12}")
        if not self.beta13 > 0:
            raise ValueError(f"beta13 must be > 0, got {self.beta13}")
        if not self.beta2 > 1:
            raise ValueError(f"beta2 must be > 1, got {self.beta2}")
        if not (self.rho_c0 > 1 and self.rho0 > 1):
            raise ValueError("rho_c0 and rho0 must both be > 1")

    @property
    def headroom(self):
        """k2M - Ld, the gain left over after covering the disturbance."""
        return self.k2M - self.Ld


@dataclass(frozen=True)
class ReachParams:
    e1c: float
    e2c: float
    kc: float
    rho_c: float


@dataclass(frozen=True)
class SwitchErrors:
    """Errors at the switch instant tc (first time ``|e1| <= e1c``)."""

    e1: float
    e2: float

    def __neg__(self):
        return SwitchErrors(-self.e1, -self.e2)

    @property
    def opposing(self):
        return (self.e1 > 0 > self.e2) or (self.e1 < 0 < self.e2)

    @property
    def is_origin(self):
        return self.e1 == 0 and self.e2 == 0


class Zone(enum.Enum):
    I_1 = "I-1"
    I_2 = "I-2"
    II_1 = "II-1"
    II_2 = "II-2"
    III_1 = "III-1"
    III_2 = "III-2"
    IV_1 = "IV-1"
    IV_2 = "IV-2"
    ORIGIN = "origin"

    @property
    def mirror(self):
        """Zone of the point reflected through the origin."""
        return _MIRROR[self]

    def __str__(self):
        return self.value


_MIRROR = {
    Zone.II_2: Zone.IV_2,
    Zone.IV_2: Zone.II_2,
    Zone.IV_1: Zone.II_1,
    Zone.II_1: Zone.IV_1,
    Zone.III_1: Zone.I_1,
    Zone.I_1: Zone.III_1,
    Zone.III_2: Zone.I_2,
    Zone.I_2: Zone.III_2,
    Zone.ORIGIN: Zone.ORIGIN,
}


@dataclass(frozen=True)
class GainSet:
    k1: float
    k2: float
    kc: float
    rho: float | None
    rho_c: float | None
    e1c: float
    e2c: float
    e2max: float | None = None

    @classmethod
    def from_parts(cls, reach: ReachParams, k1, k2, rho=None, e2max=None):
        return cls(k1=k1, k2=k2, kc=reach.kc, rho=rho, rho_c=reach.rho_c,
                   e1c=reach.e1c, e2c=reach.e2c, e2max=e2max)

    @property
    def reach(self):
        return ReachParams(self.e1c, self.e2c, self.kc, self.rho_c)

    def replace(self, **kw):
        return replace(self, **kw)


def rho_c_for(kc, Ld, rho_c0):
    """Reaching-law steepness rho_c0 * 1/2 * ln((kc + Ld) / (kc - Ld))."""
    if not kc > Ld:
        raise InvalidGain(f"kc={kc} must exceed Ld={Ld}")
    if Ld == 0:
        # the logarithm vanishes; any positive steepness rejects a zero disturbance
        return rho_c0 * 0.5
    return rho_c0 * 0.5 * math.log((kc + Ld) / (kc - Ld))


def e2c_ceiling(config: GainConfig, e1c):
    return math.sqrt(config.headroom * e1c)


def select_reach_params(config: GainConfig, kc, e1c=None, e2c=None) -> ReachParams:
    """Pick the reaching-phase parameters.

    Without overrides ``e1c`` is the midpoint of ``(0, k2M - Ld)`` and ``e2c``
    sits on its ceiling ``sqrt((k2M - Ld) * e1c)``.
    """
    if not config.k2M > config.Ld:
        raise InfeasibleBounds(f"k2M={config.k2M} must exceed Ld={config.Ld}")
    if not kc > config.Ld:
        raise InvalidGain(f"kc={kc} must exceed Ld={config.Ld}")
    head = config.headroom
    if e1c is None:
        e1c = head / 2
    if not 0 < e1c < head:
        raise InfeasibleBounds(f"e1c={e1c} outside (0, {head})")
    top = e2c_ceiling(config, e1c)
    if e2c is None:
        e2c = top
    # the interval (e1c, top] is empty once e1c >= head
    if not (e1c < e2c <= top * (1 + 1e-12)):
        raise InfeasibleBounds(f"e2c={e2c} outside ({e1c}, {top}]")
    return ReachParams(e1c=e1c, e2c=e2c, kc=kc, rho_c=rho_c_for(kc, config.Ld, config.rho_c0))


def classify_zone(e: SwitchErrors) -> Zone:
    """Tag the switch errors with their Fig.-13 style zone.

    Boundaries follow the appendix inequalities, so the eight zones plus the
    origin tile the plane without overlap.
    """
    e1, e2 = e.e1, e.e2
    if e1 == 0 and e2 == 0:
        return Zone.ORIGIN
    if e.opposing:
        if abs(e1) < abs(e2):
            return Zone.II_2 if e1 > 0 else Zone.IV_2
        return Zone.II_1 if e1 > 0 else Zone.IV_1
    # same sign (or one of them zero)
    if e1 <= 0 and e2 <= 0:
        return Zone.III_1 if -e2 >= -e1 else Zone.III_2
    return Zone.I_1 if e2 >= e1 else Zone.I_2


def _branch(e: SwitchErrors):
    """0: opposing with |e1| < |e2|, 1: opposing with |e1| >= |e2|, 2: others."""
    if e.opposing:
        return 0 if abs(e.e1) < abs(e.e2) else 1
    return 2


def determine_k1(e: SwitchErrors, config: GainConfig) -> float:
    branch = _branch(e)
    if branch == 2:
        k1 = config.beta13
    else:
        if e.e1 == 0:
            raise DegenerateErrors("k1 ratio needs a nonzero e1(tc)")
        ratio = abs(e.e2) / abs(e.e1)
        k1 = (config.beta11 if branch == 0 else config.beta12) * ratio
    if config.fast_k1_floor and 0 < k1 < 1:
        k1 = 1.0
    return k1


def cubic_term(e: SwitchErrors, k1):
    """k1/3 * (|e1| + sqrt(e1^2 + 3 (e2/k1)^2)), the peak |e2| in zones I/III and II-1/IV-1."""
    return k1 / 3.0 * (abs(e.e1) + math.sqrt(e.e1 ** 2 + 3.0 * (e.e2 / k1) ** 2))


def k2_lower_bound(e: SwitchErrors, k1, Ld):
    """Strict lower bound on k2 for the realised zone (Ld included)."""
    first = k1 * abs(e.e2) + Ld
    if _branch(e) == 0:
        second = e.e2 ** 2 / (2 * abs(e.e1)) + Ld
    else:
        second = k1 * cubic_term(e, k1) + Ld
    return max(first, second)


def determine_k2(e: SwitchErrors, k1, config: GainConfig) -> float:
    if not k1 > 0:
        raise InvalidGain(f"k1 must be positive, got {k1}")
    if e.is_origin:
        k2 = config.beta2 * config.Ld + K2_EPS
    else:
        k2 = config.beta2 * k2_lower_bound(e, k1, config.Ld)
    if k2 > config.k2M:
        raise GainCeilingExceeded(f"k2={k2:.6g} exceeds k2M={config.k2M} for e(tc)=({e.e1:.6g}, {e.e2:.6g})")
    return k2


def e2_max(e: SwitchErrors, k1):
    return max(abs(e.e2), cubic_term(e, k1))


def log_ratio(k1, k2, e2max, Ld):
    """ln((k2 + k1 e2max + Ld) / (k2 - k1 e2max - Ld))."""
    den = k2 - k1 * e2max - Ld
    if not den > 0:
        raise SaturatedGain(f"k2 - k1*e2max - Ld = {den:.6g} <= 0")
    return math.log((k2 + k1 * e2max + Ld) / den)


def determine_rho(e: SwitchErrors, k1, k2, config: GainConfig):
    """Return ``(e2max, rho)`` for the tanh terminal law."""
    em = e2_max(e, k1)
    rho = config.rho0 * max(1 / (2 * k1), 1.0) * log_ratio(k1, k2, em, config.Ld)
    return em, max(rho, RHO_MIN)


def determine_gains(e: SwitchErrors, reach: ReachParams, config: GainConfig,
                    smooth=True, previous: GainSet | None = None) -> GainSet:
    """Run the full k1 -> k2 -> rho chain for one switch instant.

    All-zero switch errors keep ``previous`` (if any) and only enforce the
    floors on k2 and rho.
    """
    if e.is_origin:
        if previous is not None:
            k2 = max(previous.k2, config.beta2 * config.Ld + K2_EPS)
            rho = previous.rho
            if smooth:
                rho = max(rho or RHO_MIN, RHO_MIN)
            return GainSet.from_parts(reach, previous.k1, k2, rho, previous.e2max)
        k1 = determine_k1(e, config)
        k2 = determine_k2(e, k1, config)
        rho = determine_rho(e, k1, k2, config)[1] if smooth else None
        return GainSet.from_parts(reach, k1, k2, rho, 0.0)
    k1 = determine_k1(e, config)
    k2 = determine_k2(e, k1, config)
    if not smooth:
        return GainSet.from_parts(reach, k1, k2, None, e2_max(e, k1))
    em, rho = determine_rho(e, k1, k2, config)
    return GainSet.from_parts(reach, k1, k2, rho, em)


def schedule_reach(config: GainConfig, e0: SwitchErrors, kc, e1c=None, e2c=None,
                   smooth=False, stop_fraction=0.5, horizon=None) -> ReachParams:
    """Reaching parameters adapted to the measured initial errors.

    Two adjustments on top of :func:`select_reach_params`:

    * if ``|e1(0)| <= e1c`` and the terminal gains computed at t=0 would break
      the ceiling, ``e1c`` is shrunk to ``|e1(0)|/2`` so that a reaching
      phase exists and can bleed off ``e2``;
    * if ``e2(0)`` drives ``e1`` toward zero faster than ``e2c``, ``kc`` is
      raised until the worst-case braking distance uses at most
      ``stop_fraction`` of the room ``|e1(0)| - e1c``;
    * with a ``horizon`` (seconds), an ``e2(0)`` that drives ``e1`` away from
      zero is reversed within that time, which bounds both the excursion of
      ``e1`` and the length of the reaching phase.
    """
    reach = select_reach_params(config, kc, e1c, e2c)
    a1, a2 = abs(e0.e1), abs(e0.e2)
    if a1 <= reach.e1c:
        try:
            determine_gains(e0, reach, config, smooth=smooth)
            return reach
        except (GainCeilingExceeded, SaturatedGain):
            if a1 == 0:
                raise
        shrink = a1 / 2
        ratio = reach.e2c / e2c_ceiling(config, reach.e1c)
        top = e2c_ceiling(config, shrink)
        reach = select_reach_params(config, kc, shrink, max(ratio * top, min(top, 1.01 * shrink)))
    if e0.opposing and a2 > reach.e2c:
        room = stop_fraction * (a1 - reach.e1c)
        need = config.Ld + (a2 ** 2 - reach.e2c ** 2) / (2 * room)
        if smooth:
            # tanh(rho_c x) >= tanh(1) once the excess speed x exceeds 1/rho_c
            need /= math.tanh(1.0)
        if need > reach.kc:
            reach = select_reach_params(config, need, reach.e1c, reach.e2c)
    elif horizon is not None and a2 > 0 and not e0.opposing and a1 > reach.e1c:
        need = config.Ld + (a2 + reach.e2c) / horizon
        if smooth:
            need /= math.tanh(1.0)
        if need > reach.kc:
            reach = select_reach_params(config, need, reach.e1c, reach.e2c)
    return reach


@dataclass(frozen=True)
class Condition:
    name: str
    passed: bool
    slack: float
    group: str = "theorem"


@dataclass
class ConditionReport:
    zone: Zone
    conditions: list[Condition] = field(default_factory=list)

    @property
    def ok(self):
        """True iff every non-informational condition holds."""
        return all(c.passed for c in self.conditions if c.group != "coarse")

    def failed(self):
        return [c for c in self.conditions if not c.passed and c.group != "coarse"]

    def __getitem__(self, name):
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def lines(self):
        out = [f"zone: {self.zone}"]
        for c in self.conditions:
            mark = "ok  " if c.passed else "FAIL"
            out.append(f"  [{mark}] {c.group:<8} {c.name:<34} slack={c.slack:+.6g}")
        return out

    def __str__(self):
        return "\n".join(self.lines())


def _interval_slack(x, lo, hi, lo_open=True, hi_open=True):
    passed = (x > lo if lo_open else x >= lo) and (x < hi if hi_open else x <= hi)
    return passed, min(x - lo, hi - x)


def validate_conditions(g: GainSet, e: SwitchErrors, config: GainConfig) -> ConditionReport:
    """Check every inequality the gain set must satisfy for the given switch errors."""
    rep = ConditionReport(classify_zone(e))
    add = rep.conditions.append
    Ld, head = config.Ld, config.headroom

    add(Condition("kc > Ld", g.kc > Ld, g.kc - Ld))
    p, s = _interval_slack(g.e1c, 0.0, head)
    add(Condition("e1c in (0, k2M-Ld)", p, s))
    top = math.sqrt(max(head, 0.0) * g.e1c)
    p, s = _interval_slack(g.e2c, g.e1c, top, hi_open=False)
    add(Condition("e2c in (e1c, sqrt((k2M-Ld)e1c)]", p or math.isclose(g.e2c, top) and g.e2c > g.e1c, s))

    branch = _branch(e)
    if branch == 2:
        p, s = g.k1 > 0, g.k1
    else:
        ratio = abs(e.e2) / abs(e.e1)
        if branch == 0:
            p, s = _interval_slack(g.k1, 0.0, ratio)
        else:
            p, s = g.k1 > ratio, g.k1 - ratio
    add(Condition("k1 interval", p, s))
    bound = k2_lower_bound(e, g.k1, Ld)
    add(Condition("k2 > zone bound", g.k2 > bound, g.k2 - bound))
    add(Condition("k2 <= k2M", g.k2 <= config.k2M, config.k2M - g.k2))

    if g.rho_c is not None:
        need = 0.5 * math.log((g.kc + Ld) / (g.kc - Ld)) if g.kc > Ld else math.inf
        add(Condition("rho_c > 1/2 ln((kc+Ld)/(kc-Ld))", g.rho_c > need, g.rho_c - need, "smooth"))
    if g.rho is not None:
        em = e2_max(e, g.k1) if g.e2max is None else g.e2max
        den = g.k2 - g.k1 * em - Ld
        add(Condition("k2 - k1 e2max - Ld > 0", den > 0, den, "smooth"))
        if den > 0:
            need = max(1 / (2 * g.k1), 1.0) * math.log((g.k2 + g.k1 * em + Ld) / den)
            add(Condition("rho >= max(1/2k1,1) ln R", g.rho >= need, g.rho - need, "smooth"))

    # coarse two-way partition, reported for comparison only
    if e.opposing:
        ratio = abs(e.e2) / abs(e.e1)
        p, s = _interval_slack(g.k1, 0.0, ratio)
        cb = max(g.k1 * abs(e.e2) + Ld, e.e2 ** 2 / (2 * abs(e.e1)) + Ld)
    else:
        p, s = g.k1 > 0, g.k1
        cb = max(g.k1 * abs(e.e2) + Ld, g.k1 * cubic_term(e, g.k1) + Ld)
    add(Condition("k1 interval (coarse)", p, s, "coarse"))
    add(Condition("k2 > bound (coarse)", g.k2 > cb, g.k2 - cb, "coarse"))
    return rep

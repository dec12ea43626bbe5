"""Plants: the uncertain double integrator and the six-channel quadrotor.

Quadrotor states are flat arrays of length 12: positions/angles for the
channels ``x, y, z, psi, theta, phi`` followed by their rates in the same
order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleThrust, SingularAttitude

CHANNELS = ("x", "y", "z", "psi", "theta", "phi")
POSITION = CHANNELS[:3]
ATTITUDE = CHANNELS[3:]


# --------------------------------------------------------------------------
# disturbances and noise


@dataclass(frozen=True)
class Disturbance:
    """Bounded scalar signal of time.

    kinds and their parameters:

    ``constant``           value
    ``sinusoidalProduct``  offset + amp * sin(w1 t + p1) * sin(w2 t + p2)
    ``sine``               offset + amp * sin(w t + p)
    ``boundedRandom``      offset + piecewise-linear walk through uniform knots in
                           [-amp, amp], one knot every ``hold`` seconds
    ``gust``               offset + amp/2 * (1 - cos(2 pi (t - t0) / duration)) inside
                           the gust window
    """

    kind: str = "constant"
    params: dict = field(default_factory=dict)

    KINDS = ("constant", "sinusoidalProduct", "sine", "boundedRandom", "gust")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown disturbance kind {self.kind!r}")

    @classmethod
    def zero(cls):
        return cls("constant", {"value": 0.0})

    @classmethod
    def constant(cls, value):
        return cls("constant", {"value": float(value)})

    @classmethod
    def sinusoidal_product(cls, offset, amp, w1, w2, p1=0.0, p2=0.0):
        return cls("sinusoidalProduct", dict(offset=offset, amp=amp, w1=w1, w2=w2, p1=p1, p2=p2))

    @classmethod
    def sine(cls, amp, w, p=0.0, offset=0.0):
        return cls("sine", dict(amp=amp, w=w, p=p, offset=offset))

    @classmethod
    def bounded_random(cls, amp, hold=0.05, seed=0, offset=0.0):
        return cls("boundedRandom", dict(amp=amp, hold=hold, seed=int(seed), offset=offset))

    @classmethod
    def gust(cls, amp, t0, duration, offset=0.0):
        return cls("gust", dict(amp=amp, t0=t0, duration=duration, offset=offset))

    @property
    def bound(self):
        """Certified sup |d(t)|."""
        p = self.params
        if self.kind == "constant":
            return abs(p["value"])
        return abs(p.get("offset", 0.0)) + abs(p["amp"])

    def _knots(self, n):
        rng = np.random.default_rng(self.params["seed"])
        return rng.uniform(-1.0, 1.0, size=n) * self.params["amp"]

    def __call__(self, t):
        """Sample at scalar or array ``t``; returns the same shape."""
        p = self.params
        scalar = np.ndim(t) == 0
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            out = np.full_like(t, p["value"])
        elif self.kind == "sinusoidalProduct":
            out = p["offset"] + p["amp"] * np.sin(p["w1"] * t + p["p1"]) * np.sin(p["w2"] * t + p["p2"])
        elif self.kind == "sine":
            out = p["offset"] + p["amp"] * np.sin(p["w"] * t + p["p"])
        elif self.kind == "boundedRandom":
            s = np.maximum(t, 0.0) / p["hold"]
            k = np.floor(s).astype(np.int64)
            knots = self._knots(int(k.max(initial=0)) + 2)
            frac = s - k
            out = p["offset"] + knots[k] * (1 - frac) + knots[k + 1] * frac
        else:
            tau = (t - p["t0"]) / p["duration"]
            inside = (tau >= 0) & (tau <= 1)
            out = p["offset"] + np.where(inside, 0.5 * p["amp"] * (1 - np.cos(2 * np.pi * tau)), 0.0)
        return float(out) if scalar else out

    def to_dict(self):
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        return cls(d.pop("kind"), d)


def sum_bound(*ds):
    return sum(d.bound for d in ds)


@dataclass(frozen=True)
class NoiseModel:
    """Additive measurement noise on position (n1) and rate (n2)."""

    n1: Disturbance = field(default_factory=Disturbance.zero)
    n2: Disturbance = field(default_factory=Disturbance.zero)

    @property
    def is_zero(self):
        return self.n1.bound == 0 and self.n2.bound == 0


def measure(x1, x2, noise: NoiseModel, t):
    """Truth plus additive noise; works on scalars or arrays."""
    return x1 + noise.n1(t), x2 + noise.n2(t)


# --------------------------------------------------------------------------
# double integrator


def double_integrator_rhs(x1, x2, u, h, delta):
    """x1' = x2, x2' = h + u - delta."""
    return x2, h + u - delta


def cube_root(x):
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _h_zero(t, x1):
    return np.zeros_like(np.asarray(x1, dtype=float))


def _h_cube_root_sine(gain, w):
    def h(t, x1):
        return gain * np.cbrt(x1) * np.sin(w * np.asarray(t, dtype=float))
    return h


@dataclass(frozen=True)
class ScalarPlant:
    """Uncertain integrator chain with a known drift ``h(t, x1)``.

    ``order=2`` is the double integrator ``x2' = h + u - delta``;
    ``order=1`` is the first-order plant ``x1' = h + u - delta`` used by the
    PI baseline.  ``h`` is named so scenarios stay serialisable:
    ``{"kind": "zero"}`` or ``{"kind": "cubeRootSine", "gain": 5, "w": 0.5}``.
    """

    x0: tuple = (0.0, 0.0)
    h: dict = field(default_factory=lambda: {"kind": "zero"})
    order: int = 2

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {self.order}")
        self.h_fn  # validate eagerly

    @property
    def h_fn(self):
        kind = self.h.get("kind", "zero")
        if kind == "zero":
            return _h_zero
        if kind == "cubeRootSine":
            return _h_cube_root_sine(self.h["gain"], self.h["w"])
        raise ValueError(f"unknown drift kind {kind!r}")

    def rhs(self, t, x, u, delta):
        """Plant derivative for state ``x`` (length ``order``)."""
        h = float(self.h_fn(t, x[0]))
        if self.order == 1:
            return (h + u - delta,)
        return double_integrator_rhs(x[0], x[1], u, h, delta)


# --------------------------------------------------------------------------
# quadrotor


@dataclass(frozen=True)
class UavParams:
    m: float = 2.01
    g: float = 9.81
    l: float = 0.2
    Jphi: float = 0.25
    Jtheta: float = 0.25
    Jpsi: float = 0.5
    b: float = 2.923e-3
    k: float = 5e-4
    kx: float = 0.1
    ky: float = 0.1
    kz: float = 0.1
    kpsi: float = 0.05
    ktheta: float = 0.05
    kphi: float = 0.05

    def __post_init__(self):
        for name, v in self.__dict__.items():
            if not v > 0:
                raise ValueError(f"UavParams.{name} must be > 0, got {v}")

    @property
    def inertia(self):
        """(J_psi, J_theta, J_phi) in channel order."""
        return np.array([self.Jpsi, self.Jtheta, self.Jphi])

    @property
    def drag(self):
        return np.array([self.kx, self.ky, self.kz, self.kpsi, self.ktheta, self.kphi])


def h_terms(p: UavParams):
    """Known drift h_* per channel (only gravity on z)."""
    return np.array([0.0, 0.0, -p.g, 0.0, 0.0, 0.0])


def uav_delta(s, p: UavParams, Delta):
    """Lumped disturbance delta_* = (-drag * rate + Delta) / mass-or-inertia."""
    v = s[6:]
    out = np.empty(6)
    out[:3] = (-p.drag[:3] * v[:3] + Delta[:3]) / p.m
    # rotational drag torques act through the arm for pitch and roll
    arm = np.array([1.0, p.l, p.l])
    out[3:] = (-arm * p.drag[3:] * v[3:] + Delta[3:]) / p.inertia
    return out


def uav_rhs(s, ubar, p: UavParams, dist=None, t=0.0):
    """State derivative for the 12-state quadrotor.

    ``ubar`` holds the six normalised inputs; ``dist`` maps channel names to
    :class:`Disturbance` objects giving Delta_* (force or torque units).
    """
    Delta = np.zeros(6)
    if dist:
        for i, ch in enumerate(CHANNELS):
            d = dist.get(ch)
            if d is not None:
                Delta[i] = d(t)
    ds = np.empty(12)
    ds[:6] = s[6:]
    ds[6:] = h_terms(p) + np.asarray(ubar, dtype=float) + uav_delta(s, p, Delta)
    return ds


def forward_translation(F, psi, theta, phi, p: UavParams):
    """Normalised translational inputs produced by thrust F at the given attitude."""
    cps, sps = math.cos(psi), math.sin(psi)
    cth, sth = math.cos(theta), math.sin(theta)
    cph, sph = math.cos(phi), math.sin(phi)
    a = F / p.m
    return ((cps * sth * cph + sps * sph) * a,
            (sps * sth * cph - cps * sph) * a,
            cth * cph * a)


def allocate(ux, uy, uz, psi_d, p: UavParams, margin=0.05):
    """Invert the thrust map: (ubar_x, ubar_y, ubar_z) -> (F, theta_d, phi_d).

    ``uz`` is the full vertical specific force (gravity compensation included),
    so hover is ``(0, 0, g)``.
    """
    if not uz > 0:
        raise SingularAttitude(f"vertical specific force {uz:.6g} must be positive")
    a = math.sqrt(ux * ux + uy * uy + uz * uz)
    cps, sps = math.cos(psi_d), math.sin(psi_d)
    # rotate the horizontal demand into the yaw frame
    fwd = cps * ux + sps * uy
    lat = sps * ux - cps * uy
    phi = math.asin(max(-1.0, min(1.0, lat / a)))
    theta = math.atan2(fwd, uz)
    lim = math.pi / 2 - margin
    if abs(theta) >= lim or abs(phi) >= lim:
        raise SingularAttitude(f"attitude demand theta={theta:.4f}, phi={phi:.4f} too steep")
    return p.m * a, theta, phi


def mixer_matrix(p: UavParams):
    r = p.k / p.b
    return np.array([
        [1.0, 1.0, 1.0, 1.0],
        [r, -r, r, -r],
        [-p.l, 0.0, p.l, 0.0],
        [0.0, p.l, 0.0, -p.l],
    ])


def forward_rotors(Fi, p: UavParams):
    """(F1..F4) -> (F, u_psi, u_theta, u_phi)."""
    return mixer_matrix(p) @ np.asarray(Fi, dtype=float)


def mixer(F, u_psi, u_theta, u_phi, p: UavParams, strict=True):
    """Rotor forces realising total thrust and body torques."""
    Fi = np.linalg.solve(mixer_matrix(p), np.array([F, u_psi, u_theta, u_phi], dtype=float))
    if strict and np.any(Fi < 0):
        raise InfeasibleThrust(f"negative rotor force requested: {Fi}", forces=Fi)
    return Fi


def inputs_from_rotors(Fi, s, p: UavParams):
    """Normalised six-channel input produced by rotor forces at state ``s``."""
    F, upsi, uth, uph = forward_rotors(Fi, p)
    ux, uy, uz = forward_translation(F, s[3], s[4], s[5], p)
    return np.array([ux, uy, uz, upsi / p.Jpsi, uth / p.Jtheta, uph / p.Jphi])

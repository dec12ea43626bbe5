"""Quadrotor mission: position sliding loops -> allocation -> attitude sliding loops -> mixer.

The position loops and the allocation are held constant over each step
(zero-order hold) while the 12-state plant is advanced with RK4; the attitude
loops are closed at every RK4 stage.  Attitude references from the allocation
are treated as constants by the attitude loops, and their motion is absorbed by
the attitude disturbance bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..control import REACHING, SLIDING, Reference
from ..errors import InfeasibleThrust, NonFiniteState, NosmcError
from ..gains import GainConfig, GainSet, ReachParams, SwitchErrors, determine_gains, select_reach_params
from ..plant import (
    ATTITUDE,
    CHANNELS,
    POSITION,
    Disturbance,
    UavParams,
    allocate,
    forward_translation,
    h_terms,
    mixer_matrix,
)
from ..sliding import sgn
from .trace import Event, Trace


@dataclass(frozen=True)
class ChannelLoop:
    """Sliding-mode loop settings shared by a group of channels.

    ``time_scale`` (lambda >= 1) runs the gain pipeline in the time variable
    ``lambda * t``: gains come back as ``k1 * lambda``, ``k2 * lambda^2``,
    ``rho / lambda`` so that the loop converges ``lambda`` times faster.
    """

    config: GainConfig
    kc: float
    e1c: float
    e2c: float
    smooth: bool = True
    time_scale: float = 1.0

    def reach(self) -> ReachParams:
        r = select_reach_params(self.config, self.kc, self.e1c, self.e2c)
        lam = self.time_scale
        return ReachParams(e1c=r.e1c, e2c=r.e2c * lam, kc=r.kc * lam * lam, rho_c=r.rho_c / lam)

    def gains(self, e1, e2, previous=None) -> GainSet:
        lam = self.time_scale
        base = select_reach_params(self.config, self.kc, self.e1c, self.e2c)
        prev = None
        if previous is not None:
            prev = previous.replace(k1=previous.k1 / lam, k2=previous.k2 / lam ** 2,
                                    rho=None if previous.rho is None else previous.rho * lam)
        g = determine_gains(SwitchErrors(e1, e2 / lam), base, self.config, smooth=self.smooth, previous=prev)
        return g.replace(k1=g.k1 * lam, k2=g.k2 * lam * lam,
                         rho=None if g.rho is None else g.rho / lam,
                         kc=base.kc * lam * lam, rho_c=base.rho_c / lam, e2c=base.e2c * lam,
                         e2max=None if g.e2max is None else g.e2max * lam)


class _Channel:
    """Mode bookkeeping and control law for one channel."""

    def __init__(self, name, loop: ChannelLoop):
        self.name = name
        self.loop = loop
        self.reach = loop.reach()
        self.mode = REACHING
        self.g: GainSet | None = None
        self.gains = []

    def law(self, e1, e2):
        r = self.reach
        if self.mode == REACHING:
            s = e2 + r.e2c * sgn(e1)
            return r.kc * (math.tanh(r.rho_c * s) if self.loop.smooth else sgn(s))
        g = self.g
        s = e2 + g.k1 * e1
        return g.k2 * (math.tanh(g.rho * s) if self.loop.smooth else sgn(s))

    def switch(self, e1, e2, t):
        try:
            self.g = self.loop.gains(e1, e2, previous=self.g)
        except NosmcError as ex:
            raise ex.at(t)
        self.mode = SLIDING
        self.gains.append((t, self.g))

    def update(self, e1, e2, t, events, jump=False):
        """Advance the mode machine; returns True when gains were (re)determined."""
        if jump:
            if abs(e1) > self.reach.e1c:
                self.mode = REACHING
                return False
            self.switch(e1, e2, t)
            events.append(Event("gainUpdate", t, self.name))
            return True
        if self.mode == REACHING and abs(e1) <= self.reach.e1c:
            self.switch(e1, e2, t)
            events.append(Event("tc", t, self.name))
            events.append(Event("gainUpdate", t, self.name))
            return True
        if self.mode == SLIDING and abs(e1) > self.reach.e1c:
            self.mode = REACHING
            events.append(Event("reentry", t, self.name))
        return False

    @property
    def k1(self):
        return self.g.k1 if self.g is not None else float("nan")


@dataclass(frozen=True)
class UavMission:
    references: dict  # channel -> Reference for x, y, z
    position: ChannelLoop
    attitude: ChannelLoop
    params: UavParams = field(default_factory=UavParams)
    x0: tuple = (0.0,) * 12
    disturbances: dict = field(default_factory=dict)  # channel -> Disturbance (Delta_*)
    dt: float = 1e-3
    t_end: float = 30.0
    event_tolerance: float = 5e-3
    psi_d: float = 0.0

    @property
    def jump_times(self):
        ts = set()
        for ref in self.references.values():
            ts.update(ref.jump_times)
        return sorted(ts)

    @property
    def delta_bound(self):
        """Certified bound on |delta_*| from Delta_* and drag at the given speed budget."""
        out = {}
        p = self.params
        for ch in CHANNELS:
            d = self.disturbances.get(ch)
            b = 0.0 if d is None else d.bound
            out[ch] = b / (p.m if ch in POSITION else p.inertia[ATTITUDE.index(ch)])
        return out


@dataclass
class UavTrace:
    t: np.ndarray
    state: np.ndarray  # (n+1, 12)
    channels: dict  # channel -> Trace
    rotor_forces: np.ndarray  # (n+1, 4)
    events: list
    meta: dict

    def events_of(self, kind):
        return [e for e in self.events if e.kind == kind]

    def write_csv(self, path):
        import csv
        from pathlib import Path

        path = Path(path)
        cols = ["t"]
        for ch in self.channels:
            cols += [f"{k}_{ch}" for k in ("e1", "e2", "sigma", "u", "d", "mode", "x1", "xd")]
        cols += [f"F{i}" for i in range(1, 5)]
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            trs = list(self.channels.values())
            for i in range(len(self.t)):
                row = [repr(float(self.t[i]))]
                for tr in trs:
                    row += [repr(float(tr.e1[i])), repr(float(tr.e2[i])), repr(float(tr.sigma[i])),
                            repr(float(tr.u[i])), repr(float(tr.d[i])), str(tr.mode[i]),
                            repr(float(tr.x1[i])), repr(float(tr.xd[i]))]
                row += [repr(float(f)) for f in self.rotor_forces[i]]
                w.writerow(row)
        return path


def _rhs(s, F, att_ref, p: UavParams, Delta, Minv, hs, chans):
    """Plant derivative with the attitude loops closed continuously."""
    torque = np.empty(3)
    for k, c in enumerate(chans):
        torque[k] = c.law(att_ref[k] - s[3 + k], -s[9 + k]) * p.inertia[k]
    Fi = Minv @ np.array([F, torque[0], torque[1], torque[2]])
    ux, uy, uz = forward_translation(F, s[3], s[4], s[5], p)
    ubar = np.array([ux, uy, uz, torque[0] / p.Jpsi, torque[1] / p.Jtheta, torque[2] / p.Jphi])
    v = s[6:]
    delta = np.empty(6)
    delta[:3] = (-p.drag[:3] * v[:3] + Delta[:3]) / p.m
    delta[3:] = (-_ARM(p) * p.drag[3:] * v[3:] + Delta[3:]) / p.inertia
    ds = np.empty(12)
    ds[:6] = v
    ds[6:] = hs + ubar + delta
    return ds, delta, Fi


def _ARM(p):
    # rotational drag torques act through the arm for pitch and roll
    return np.array([1.0, p.l, p.l])


def run_uav(mission: UavMission) -> UavTrace:
    """Fly the mission and return per-channel traces plus rotor forces.

    The position loops and the allocation are sampled once per step; the
    attitude loops are evaluated at every RK4 stage with their mode frozen
    over the step.  Negative rotor forces are reported through the
    ``infeasibleThrust`` event and the ``infeasible_steps`` count, never
    clamped.
    """
    p = mission.params
    dt = mission.dt
    n = int(round(mission.t_end / dt))
    t = np.arange(n + 1) * dt
    th = np.arange(2 * n + 1) * (dt / 2)
    Delta = np.zeros((6, 2 * n + 1))
    for k, ch in enumerate(CHANNELS):
        d: Disturbance | None = mission.disturbances.get(ch)
        if d is not None:
            Delta[k] = d(th)
    refs = {ch: np.vstack(mission.references[ch].sample(t)) for ch in POSITION}
    jump_idx = {int(round(tj / dt)) for tj in mission.jump_times}

    chans = {ch: _Channel(ch, mission.position) for ch in POSITION}
    chans.update({ch: _Channel(ch, mission.attitude) for ch in ATTITUDE})
    att = [chans[ch] for ch in ATTITUDE]
    Minv = np.linalg.inv(mixer_matrix(p))
    hs = h_terms(p)

    rec = {k: np.zeros((6, n + 1)) for k in ("e1", "e2", "sigma", "u", "d", "xd")}
    modes = np.zeros((6, n + 1), dtype=np.int8)
    forces = np.zeros((n + 1, 4))
    S = np.zeros((n + 1, 12))
    s = np.array(mission.x0, dtype=float)
    S[0] = s
    events = []
    infeasible = 0
    att_ref = np.zeros(3)
    fill = mission.position.config.beta13

    for i in range(n + 1):
        ti = t[i]
        if i in jump_idx:
            events.append(Event("refJump", ti))
        ubar = np.zeros(3)
        for k, ch in enumerate(POSITION):
            xd, xd1, xd2 = refs[ch][:, i]
            e1, e2 = xd - s[k], xd1 - s[6 + k]
            c = chans[ch]
            c.update(e1, e2, ti, events, jump=i in jump_idx)
            ubar[k] = c.law(e1, e2) - hs[k]
            rec["e1"][k, i], rec["e2"][k, i], rec["xd"][k, i] = e1, e2, xd
            rec["u"][k, i] = ubar[k]
            rec["sigma"][k, i] = e2 + (c.k1 if c.g is not None else fill) * e1
            rec["d"][k, i] = xd2
            modes[k, i] = c.mode == SLIDING
        try:
            F, theta_d, phi_d = allocate(ubar[0], ubar[1], ubar[2], mission.psi_d, p)
        except NosmcError as ex:
            raise ex.at(ti)
        att_ref[:] = (mission.psi_d, theta_d, phi_d)
        for k, c in enumerate(att):
            e1, e2 = att_ref[k] - s[3 + k], -s[9 + k]
            c.update(e1, e2, ti, events)
            j = 3 + k
            rec["e1"][j, i], rec["e2"][j, i], rec["xd"][j, i] = e1, e2, att_ref[k]
            rec["sigma"][j, i] = e2 + (c.k1 if c.g is not None else 0.0) * e1
            modes[j, i] = c.mode == SLIDING
        j = 2 * i
        k1s, dl, Fi = _rhs(s, F, att_ref, p, Delta[:, j], Minv, hs, att)
        forces[i] = Fi
        rec["u"][3:, i] = (_attitude_inputs(Fi, p))
        rec["d"][:3, i] -= dl[:3]
        rec["d"][3:, i] = -dl[3:]
        if np.any(Fi < 0):
            infeasible += 1
            if infeasible == 1:
                events.append(Event("infeasibleThrust", ti))
        if i == n:
            break
        k2s = _rhs(s + dt / 2 * k1s, F, att_ref, p, Delta[:, j + 1], Minv, hs, att)[0]
        k3s = _rhs(s + dt / 2 * k2s, F, att_ref, p, Delta[:, j + 1], Minv, hs, att)[0]
        k4s = _rhs(s + dt * k3s, F, att_ref, p, Delta[:, j + 2], Minv, hs, att)[0]
        s = s + dt / 6 * (k1s + 2 * k2s + 2 * k3s + k4s)
        if not np.all(np.isfinite(s)):
            raise NonFiniteState(f"UAV state left the reals at t={ti + dt:.6g}").at(ti + dt)
        S[i + 1] = s

    names = np.array([REACHING, SLIDING])
    channels = {}
    for k, ch in enumerate(CHANNELS):
        ev = [e for e in events if e.info in ("", ch)]
        channels[ch] = Trace(
            t=t, e1=rec["e1"][k], e2=rec["e2"][k], sigma=rec["sigma"][k], u=rec["u"][k],
            d=rec["d"][k], mode=names[modes[k]], events=ev, gains=chans[ch].gains,
            x1=S[:, k], xd=rec["xd"][k],
            meta={"dt": dt, "event_tolerance": mission.event_tolerance, "channel": ch},
        )
    return UavTrace(t=t, state=S, channels=channels, rotor_forces=forces, events=events,
                    meta={"infeasible_steps": infeasible, "dt": dt})


def _attitude_inputs(Fi, p):
    """Normalised attitude inputs (psi, theta, phi) realised by rotor forces."""
    _, upsi, uth, uph = mixer_matrix(p) @ Fi
    return np.array([upsi, uth, uph]) / p.inertia


__all__ = ["ChannelLoop", "UavMission", "UavTrace", "run_uav", "InfeasibleThrust"]

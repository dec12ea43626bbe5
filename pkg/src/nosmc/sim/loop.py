"""Closed-loop runs of the scalar plants.

The sliding controllers cancel the known drift ``h`` exactly, so the loop is
integrated in error coordinates: ``e1' = e2``, ``e2' = -v(e - n) + w`` with
``w = xd'' + delta`` sampled on the half-step grid.  Plant outputs and the
applied input ``u = v - h`` are reconstructed afterwards.
"""
from __future__ import annotations

import math

import numpy as np

from .. import _kernels_py, kernels
from ..control import (
    REACHING,
    SLIDING,
    ControllerSpec,
    ControllerState,
    Reference,
    enter_sliding,
    initial_state,
    on_reference_jump,
)
from ..errors import NonFiniteState, NosmcError
from ..gains import SwitchErrors, schedule_reach, select_reach_params
from ..plant import Disturbance, NoiseModel, ScalarPlant
from ..sliding import ErrorState, ideal_law, smooth_law
from .trace import Event, SimConfig, Trace

_MODE_NAMES = np.array([REACHING, SLIDING])


def _kernel(name):
    return kernels if name is None else kernels.backend(name)


def run_scenario(plant: ScalarPlant, controller: ControllerSpec, reference: Reference,
                 disturbance: Disturbance | None, cfg: SimConfig,
                 noise: NoiseModel | None = None, kernel=None) -> Trace:
    """Integrate one closed loop and return its :class:`Trace`.

    Errors raised by the gain pipeline or the integrator carry the
    simulation time in their ``t`` attribute.
    """
    noise = noise or NoiseModel()
    n, dt = cfg.steps, cfg.dt
    th = np.arange(2 * n + 1) * (dt / 2)
    xd, xd1, xd2 = reference.sample(th)
    delta = np.zeros_like(th) if disturbance is None else np.asarray(disturbance(th), dtype=float)
    w = (xd2 if plant.order == 2 else xd1) + delta
    n1 = np.ascontiguousarray(noise.n1(th), dtype=float)
    n2 = np.ascontiguousarray(noise.n2(th), dtype=float)
    if plant.order == 1:
        n2 = np.zeros_like(n2)

    e1 = np.zeros(n + 1)
    e2 = np.zeros(n + 1)
    u = np.zeros(n + 1)
    e1[0] = xd[0] - plant.x0[0]
    e2[0] = xd1[0] - plant.x0[1] if plant.order == 2 else 0.0

    jumps = {}
    for tj in reference.jump_times:
        ij = int(round(tj / dt))
        if 0 < ij <= n:
            jumps[ij] = tj

    if controller.kind in ("pid", "pi"):
        state = _run_pid(e1, e2, u, w, n, dt, controller, reference, jumps, kernel)
    else:
        state = _run_sliding(e1, e2, u, w, n1, n2, n, dt, controller, reference, jumps, cfg, kernel)
    end = state["end"]
    t = np.arange(end + 1) * dt
    xd_g, xd1_g = xd[: 2 * end + 1: 2], xd1[: 2 * end + 1: 2]
    e1, e2, u = e1[: end + 1], e2[: end + 1], u[: end + 1]
    x1 = xd_g - e1
    h = np.asarray(plant.h_fn(t, x1), dtype=float)
    trace = Trace(
        t=t, e1=e1, e2=e2, sigma=state["sigma"], u=u - h, d=w[: 2 * end + 1: 2].copy(),
        mode=state["mode"], events=state["events"], gains=state["gains"], x1=x1, xd=xd_g,
        meta={
            "dt": dt,
            "event_tolerance": cfg.event_tolerance,
            "controller": controller.kind,
            "backend": (kernel or kernels.BACKEND),
            "Ld": controller.config.Ld if controller.config else None,
            "reach": state.get("reach"),
        },
    )
    if plant.order == 2:
        trace.meta["x2"] = xd1_g - e2
    if "integral" in state:
        trace.meta["integral"] = state["integral"][: end + 1]
    return trace


def _run_sliding(e1, e2, u, w, n1, n2, n, dt, spec, reference, jumps, cfg, kernel):
    kern = _kernel(kernel)
    if cfg.integrator == "euler":
        step = _kernels_py.run_segment_euler
    else:
        step = kern.run_segment
    config = spec.config
    law = kernels.SMOOTH if spec.smooth else kernels.IDEAL
    e0 = SwitchErrors(e1[0] - n1[0], e2[0] - n2[0])
    if spec.schedule:
        reach = schedule_reach(config, e0, spec.kc, spec.e1c, spec.e2c, smooth=spec.smooth,
                               horizon=spec.horizon)
    else:
        reach = select_reach_params(config, spec.kc, spec.e1c, spec.e2c)
    cs: ControllerState = initial_state(reach)
    events, gains = [], []
    modes = np.zeros(n + 1, dtype=np.int8)
    k1s = np.full(n + 1, np.nan)

    def measured(i):
        return ErrorState(float(e1[i] - n1[2 * i]), float(e2[i] - n2[2 * i]))

    def switch(i, kind):
        nonlocal cs
        ti = i * dt
        try:
            cs = _override(enter_sliding(cs, measured(i), config, ti, smooth=spec.smooth), spec)
        except NosmcError as ex:
            raise ex.at(ti)
        if kind:
            events.append(Event(kind, ti))
        events.append(Event("gainUpdate", ti))
        gains.append((ti, cs.gains))

    if abs(e0.e1) <= reach.e1c:
        switch(0, "tc")
    i, end = 0, n
    pending = sorted(jumps)
    while i < end:
        nxt = next((j for j in pending if j > i), end)
        nxt = min(nxt, end)
        g = cs.gains
        mode = kernels.SLIDING if cs.mode == SLIDING else kernels.REACHING
        stop, code = step(e1, e2, u, w, n1, n2, i, nxt, dt, law, mode,
                          reach.e1c, reach.e2c, reach.kc, reach.rho_c,
                          g.k1, g.k2, g.rho if g.rho is not None else 0.0)
        modes[i:stop] = mode
        k1s[i:stop] = g.k1 if cs.mode == SLIDING else np.nan
        i = stop
        if code == kernels.NONFINITE:
            raise NonFiniteState(f"state left the reals at t={i * dt:.6g}").at(i * dt)
        if code == kernels.TC:
            switch(i, "tc")
            if cfg.settle_window is not None and not any(j > i for j in pending):
                end = min(end, i + int(round(cfg.settle_window / dt)))
        elif code == kernels.REENTRY:
            events.append(Event("reentry", i * dt))
            cs = cs.replace(mode=REACHING, tc_event=None)
        if i in jumps and i in pending:
            pending.remove(i)
            tj = jumps[i]
            de1, de2 = reference.jump(tj)
            e1[i] += de1
            e2[i] += de2
            events.append(Event("refJump", i * dt))
            try:
                cs = _override(on_reference_jump(cs, measured(i), config, t=i * dt, smooth=spec.smooth), spec)
            except NosmcError as ex:
                raise ex.at(i * dt)
            if cs.mode == SLIDING:
                events.append(Event("gainUpdate", i * dt))
                gains.append((i * dt, cs.gains))
    # control at the final sample
    g = cs.gains
    fn = smooth_law if spec.smooth else ideal_law
    m = measured(end)
    if cs.mode == SLIDING:
        u[end] = fn(m.e1, m.e2, g)
    else:
        u[end] = fn(m.e1, m.e2, g.replace(e1c=-1.0))
    modes[end] = kernels.SLIDING if cs.mode == SLIDING else kernels.REACHING
    k1s[end] = g.k1 if cs.mode == SLIDING else np.nan

    k1s = k1s[: end + 1]
    # reaching samples carry the k1 of the next terminal phase (or of the first one)
    fill = gains[0][1].k1 if gains else config.beta13
    k1s = _backfill(k1s, fill)
    sigma = e2[: end + 1] + k1s * e1[: end + 1]
    events.extend(_surface_hits(sigma, e1[: end + 1], e2[: end + 1], gains, dt, cfg.event_tolerance,
                                config.Ld))
    events.sort(key=lambda ev: ev.t)
    return {"end": end, "mode": _MODE_NAMES[modes[: end + 1]], "sigma": sigma,
            "events": events, "gains": gains, "reach": reach}


def _override(cs, spec):
    if spec.rho is not None and spec.smooth and cs.mode == SLIDING:
        return cs.replace(gains=cs.gains.replace(rho=spec.rho))
    return cs


def _backfill(a, fill):
    """Replace each NaN by the next non-NaN value to its right (``fill`` past the end)."""
    out = np.append(a, fill)
    nan = np.isnan(out)
    if not nan.any():
        return out[:-1]
    # index of the next valid entry, found by a reversed running minimum
    pos = np.where(nan, out.size - 1, np.arange(out.size))
    pos = np.minimum.accumulate(pos[::-1])[::-1]
    return out[pos][:-1]


def _layer(g, Ld):
    """Half-width of the tanh boundary layer: where k2 tanh(rho sigma) balances Ld."""
    if g.rho is None or Ld <= 0:
        return 0.0
    return math.atanh(min(Ld / g.k2, 1 - 1e-12)) / g.rho


def _surface_hits(sigma, e1, e2, gains, dt, tol, Ld=0.0):
    """First arrival on the surface after each gain determination.

    Arrival is a sign change of sigma or |sigma| <= tol; for the smoothed law
    the tolerance is widened by the boundary-layer half-width, inside which
    sigma settles instead of crossing.
    """
    out = []
    idx = [int(round(tg / dt)) for tg, _ in gains] + [sigma.size]
    for k, (tg, g) in enumerate(gains):
        a, b = idx[k], idx[k + 1]
        tol_k = tol + _layer(g, Ld)
        s = e2[a:b] + g.k1 * e1[a:b]
        if s.size == 0:
            continue
        s0 = np.sign(s[0])
        if s0 == 0 or abs(s[0]) <= tol_k:
            out.append(Event("surfaceHit", tg))
            continue
        hit = np.flatnonzero((s * s0 <= 0) | (np.abs(s) <= tol_k))
        if not hit.size:
            continue
        j = int(hit[0])
        if s[j] * s0 < 0:
            th = (a + j - 1 + s[j - 1] / (s[j - 1] - s[j])) * dt
        else:
            th = (a + j) * dt
        out.append(Event("surfaceHit", th))
    return out


def _run_pid(e1, e2, u, w, n, dt, spec, reference, jumps, kernel):
    kern = _kernel(kernel)
    order = 3 if spec.kind == "pid" else 2
    pg = spec.pid
    integ = np.zeros(n + 1)
    events = []
    i = 0
    pending = sorted(jumps)
    while i < n:
        nxt = min(next((j for j in pending if j > i), n), n)
        stop, code = kern.run_pid(e1, e2, u, integ, w, i, nxt, dt, pg.kp, pg.ki, pg.kd, order)
        i = stop
        if code == kernels.NONFINITE:
            raise NonFiniteState(f"state left the reals at t={i * dt:.6g}").at(i * dt)
        if i in pending:
            pending.remove(i)
            de1, de2 = reference.jump(jumps[i])
            e1[i] += de1
            if order == 3:
                e2[i] += de2
            events.append(Event("refJump", i * dt))
    if order == 3:
        u[n] = pg.kp * e1[n] + pg.ki * integ[n] + pg.kd * e2[n]
    else:
        u[n] = pg.kp * e1[n] + pg.ki * integ[n]
    mode = np.full(n + 1, spec.kind, dtype=object).astype(str)
    return {"end": n, "mode": mode, "sigma": np.full(n + 1, np.nan), "events": events,
            "gains": [], "integral": integ}

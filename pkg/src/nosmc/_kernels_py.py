"""Pure-Python integration kernels.

Same signatures and stop codes as the compiled ``_kernels`` extension; used
when the extension is not built and as the reference in equivalence tests.

Sample arrays (``w``, ``n1``, ``n2``) live on a half-step grid: index ``2*i``
is ``t_i`` and ``2*i + 1`` is ``t_i + dt/2``.
"""
import math

END = 0
TC = 1
REENTRY = 2
NONFINITE = 3

IDEAL = 0
SMOOTH = 1

REACHING = 0
SLIDING = 1


def _sgn(x):
    return float(x > 0) - float(x < 0)


def _law(e1, e2, law, mode, e2c, kc, rhoc, k1, k2, rho):
    if mode == REACHING:
        s = e2 + e2c * _sgn(e1)
        if law == IDEAL:
            return kc * _sgn(s)
        return kc * math.tanh(rhoc * s)
    s = e2 + k1 * e1
    if law == IDEAL:
        return k2 * _sgn(s)
    return k2 * math.tanh(rho * s)


def run_segment(e1, e2, u, w, n1, n2, i0, i1, dt,
                law, mode, e1c, e2c, kc, rhoc, k1, k2, rho):
    """Advance the sliding-mode error loop from grid index i0 towards i1.

    The law sees measured errors ``e - n`` and is evaluated at every RK4
    stage with the mode frozen over the step.  Returns ``(i, code)`` where
    ``i`` is the last filled index.
    """
    h = 0.5 * dt
    x1 = float(e1[i0])
    x2 = float(e2[i0])
    base = 2 * i0
    w, n1, n2 = (a[base:2 * i1 + 1].tolist() for a in (w, n1, n2))
    for i in range(i0, i1):
        j = 2 * i - base
        v1 = _law(x1 - n1[j], x2 - n2[j], law, mode, e2c, kc, rhoc, k1, k2, rho)
        u[i] = v1
        a1 = x2
        b1 = -v1 + w[j]
        y1 = x1 + h * a1
        y2 = x2 + h * b1
        v2 = _law(y1 - n1[j + 1], y2 - n2[j + 1], law, mode, e2c, kc, rhoc, k1, k2, rho)
        a2 = y2
        b2 = -v2 + w[j + 1]
        y1 = x1 + h * a2
        y2 = x2 + h * b2
        v3 = _law(y1 - n1[j + 1], y2 - n2[j + 1], law, mode, e2c, kc, rhoc, k1, k2, rho)
        a3 = y2
        b3 = -v3 + w[j + 1]
        y1 = x1 + dt * a3
        y2 = x2 + dt * b3
        v4 = _law(y1 - n1[j + 2], y2 - n2[j + 2], law, mode, e2c, kc, rhoc, k1, k2, rho)
        a4 = y2
        b4 = -v4 + w[j + 2]
        x1 = x1 + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        x2 = x2 + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        e1[i + 1] = x1
        e2[i + 1] = x2
        if not (math.isfinite(x1) and math.isfinite(x2)):
            return i + 1, NONFINITE
        m = abs(x1 - n1[j + 2])
        if mode == REACHING and m <= e1c:
            return i + 1, TC
        if mode == SLIDING and m > e1c:
            return i + 1, REENTRY
    return i1, END


def run_pid(e1, e2, u, integ, w, i0, i1, dt, kp, ki, kd, order):
    """PID (order 3) or PI (order 2) loop with zero-order-hold control.

    order 3: e1'' = -u + w on the double integrator, e2 = e1'.
    order 2: e1' = -u + w on the first-order plant, e2 records e1'.
    The integral of e1 is accumulated with the trapezoidal rule.
    """
    x1 = float(e1[i0])
    x2 = float(e2[i0])
    acc = float(integ[i0])
    base = 2 * i0
    wl = w[base:2 * i1 + 1].tolist()
    for i in range(i0, i1):
        j = 2 * i - base
        if order == 3:
            c = kp * x1 + ki * acc + kd * x2
            u[i] = c
            a1 = x2
            b1 = -c + wl[j]
            a2 = x2 + 0.5 * dt * b1
            b2 = -c + wl[j + 1]
            a3 = x2 + 0.5 * dt * b2
            b3 = b2
            a4 = x2 + dt * b3
            b4 = -c + wl[j + 2]
            nx1 = x1 + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            nx2 = x2 + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        else:
            c = kp * x1 + ki * acc
            u[i] = c
            nx1 = x1 + dt / 6.0 * (-6.0 * c + wl[j] + 4.0 * wl[j + 1] + wl[j + 2])
            nx2 = -c + wl[j + 2]
            if i == i0:
                e2[i0] = -c + wl[j]
        acc = acc + 0.5 * dt * (x1 + nx1)
        x1 = nx1
        x2 = nx2
        e1[i + 1] = x1
        e2[i + 1] = x2
        integ[i + 1] = acc
        if not (math.isfinite(x1) and math.isfinite(x2)):
            return i + 1, NONFINITE
    return i1, END


def run_segment_euler(e1, e2, u, w, n1, n2, i0, i1, dt,
                      law, mode, e1c, e2c, kc, rhoc, k1, k2, rho):
    """Forward-Euler twin of :func:`run_segment` (pure Python only)."""
    x1 = float(e1[i0])
    x2 = float(e2[i0])
    base = 2 * i0
    w, n1, n2 = (a[base:2 * i1 + 1].tolist() for a in (w, n1, n2))
    for i in range(i0, i1):
        j = 2 * i - base
        v = _law(x1 - n1[j], x2 - n2[j], law, mode, e2c, kc, rhoc, k1, k2, rho)
        u[i] = v
        x1, x2 = x1 + dt * x2, x2 + dt * (-v + w[j])
        e1[i + 1] = x1
        e2[i + 1] = x2
        if not (math.isfinite(x1) and math.isfinite(x2)):
            return i + 1, NONFINITE
        m = abs(x1 - n1[j + 2])
        if mode == REACHING and m <= e1c:
            return i + 1, TC
        if mode == SLIDING and m > e1c:
            return i + 1, REENTRY
    return i1, END

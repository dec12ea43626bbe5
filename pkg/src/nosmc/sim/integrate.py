"""Fixed-step one-step integrators for small state vectors."""
import numpy as np

from ..errors import NonFiniteState


def _check(x, t):
    if not np.all(np.isfinite(x)):
        raise NonFiniteState(f"non-finite state at t={t:.6g}: {x}").at(t)
    return x


def step_rk4(f, x, t, dt):
    """Classical four-stage Runge-Kutta step of ``x' = f(t, x)``."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    x = np.asarray(x, dtype=float)
    k1 = np.asarray(f(t, x), dtype=float)
    k2 = np.asarray(f(t + dt / 2, x + dt / 2 * k1), dtype=float)
    k3 = np.asarray(f(t + dt / 2, x + dt / 2 * k2), dtype=float)
    k4 = np.asarray(f(t + dt, x + dt * k3), dtype=float)
    return _check(x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4), t + dt)


def step_euler(f, x, t, dt):
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    x = np.asarray(x, dtype=float)
    return _check(x + dt * np.asarray(f(t, x), dtype=float), t + dt)


STEPPERS = {"rk4": step_rk4, "euler": step_euler}

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernels; mirrors ``_kernels_py`` line for line."""
from libc.math cimport tanh, fabs, isfinite

cdef enum:
    END = 0
    TC = 1
    REENTRY = 2
    NONFINITE = 3
    IDEAL = 0
    REACHING = 0
    SLIDING = 1


cdef inline double _sgn(double x) nogil:
    if x > 0:
        return 1.0
    if x < 0:
        return -1.0
    return 0.0


cdef inline double _law(double e1, double e2, int law, int mode, double e2c, double kc,
                        double rhoc, double k1, double k2, double rho) nogil:
    cdef double s
    if mode == REACHING:
        s = e2 + e2c * _sgn(e1)
        if law == IDEAL:
            return kc * _sgn(s)
        return kc * tanh(rhoc * s)
    s = e2 + k1 * e1
    if law == IDEAL:
        return k2 * _sgn(s)
    return k2 * tanh(rho * s)


def run_segment(double[::1] e1, double[::1] e2, double[::1] u, const double[::1] w,
                const double[::1] n1, const double[::1] n2, Py_ssize_t i0, Py_ssize_t i1,
                double dt, int law, int mode, double e1c, double e2c, double kc,
                double rhoc, double k1, double k2, double rho):
    cdef double h = 0.5 * dt
    cdef double x1 = e1[i0]
    cdef double x2 = e2[i0]
    cdef double v1, v2, v3, v4, a1, a2, a3, a4, b1, b2, b3, b4, y1, y2, m
    cdef Py_ssize_t i, j
    cdef Py_ssize_t last = i1
    cdef int code = END
    with nogil:
        for i in range(i0, i1):
            j = 2 * i
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
            if not (isfinite(x1) and isfinite(x2)):
                code = NONFINITE
                last = i + 1
                break
            m = fabs(x1 - n1[j + 2])
            if mode == REACHING and m <= e1c:
                code = TC
                last = i + 1
                break
            if mode == SLIDING and m > e1c:
                code = REENTRY
                last = i + 1
                break
    return last, code


def run_pid(double[::1] e1, double[::1] e2, double[::1] u, double[::1] integ,
            const double[::1] w, Py_ssize_t i0, Py_ssize_t i1, double dt,
            double kp, double ki, double kd, int order):
    cdef double x1 = e1[i0]
    cdef double x2 = e2[i0]
    cdef double acc = integ[i0]
    cdef double c, a1, a2, a3, a4, b1, b2, b3, b4, nx1, nx2
    cdef Py_ssize_t i, j
    cdef Py_ssize_t last = i1
    cdef int code = END
    with nogil:
        for i in range(i0, i1):
            j = 2 * i
            if order == 3:
                c = kp * x1 + ki * acc + kd * x2
                u[i] = c
                a1 = x2
                b1 = -c + w[j]
                a2 = x2 + 0.5 * dt * b1
                b2 = -c + w[j + 1]
                a3 = x2 + 0.5 * dt * b2
                b3 = b2
                a4 = x2 + dt * b3
                b4 = -c + w[j + 2]
                nx1 = x1 + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
                nx2 = x2 + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
            else:
                c = kp * x1 + ki * acc
                u[i] = c
                nx1 = x1 + dt / 6.0 * (-6.0 * c + w[j] + 4.0 * w[j + 1] + w[j + 2])
                nx2 = -c + w[j + 2]
                if i == i0:
                    e2[i0] = -c + w[j]
            acc = acc + 0.5 * dt * (x1 + nx1)
            x1 = nx1
            x2 = nx2
            e1[i + 1] = x1
            e2[i + 1] = x2
            integ[i + 1] = acc
            if not (isfinite(x1) and isfinite(x2)):
                code = NONFINITE
                last = i + 1
                break
    return last, code

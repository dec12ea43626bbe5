#!/usr/bin/env python3
"""Compiled vs pure-Python integration kernels.

Usage:
  python benchmarks/bench_kernels.py
  python benchmarks/bench_kernels.py --steps 200000 --repeat 5

Both backends integrate the same closed loop from the same arrays; the last
column checks that they agree.
"""
import argparse
import sys
import time

import numpy as np

from nosmc import _kernels_py, kernels

CASES = {
    # name: (law, mode)
    "ideal-sliding": (kernels.IDEAL, kernels.SLIDING),
    "smooth-sliding": (kernels.SMOOTH, kernels.SLIDING),
    "smooth-reaching": (kernels.SMOOTH, kernels.REACHING),
}


def _inputs(steps, dt):
    th = np.arange(2 * steps + 1) * (dt / 2)
    w = 3.0 + 2.0 * np.sin(0.3 * th) * np.sin(1.6 * th)
    zero = np.zeros_like(th)
    return w, zero


def _segment(mod, steps, dt, law, mode):
    w, zero = _inputs(steps, dt)
    e1 = np.zeros(steps + 1)
    e2 = np.zeros(steps + 1)
    u = np.zeros(steps + 1)
    e1[0], e2[0] = (1.5, -2.0) if mode == kernels.SLIDING else (100.0, -10.0)
    # keep the mode for the whole run: no reentry while sliding, no switch while reaching
    e1c = 1e9 if mode == kernels.SLIDING else 1e-9
    t0 = time.perf_counter()
    mod.run_segment(e1, e2, u, w, zero, zero, 0, steps, dt, law, mode,
                    e1c, 5.0, 6.0, 59.95, 1.25, 16.9, 32.19)
    return time.perf_counter() - t0, e1


def _pid(mod, steps, dt):
    w, _ = _inputs(steps, dt)
    e1 = np.zeros(steps + 1)
    e2 = np.zeros(steps + 1)
    u = np.zeros(steps + 1)
    integ = np.zeros(steps + 1)
    e1[0], e2[0] = 100.0, -10.0
    t0 = time.perf_counter()
    mod.run_pid(e1, e2, u, integ, w, 0, steps, dt, 2.0, 1.0, 1.0, 3)
    return time.perf_counter() - t0, e1


def best(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t, out = fn()
        times.append(t)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--dt", type=float, default=1e-4)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    compiled = kernels.backend("cython") if kernels.HAVE_COMPILED else None
    if compiled is None:
        print("compiled kernels are not built; only the Python timings are shown")
    print(f"{'case':<18} {'python ns/step':>15} {'cython ns/step':>15} {'speedup':>9} {'max |diff|':>11}")
    print("-" * 72)
    cases = [(name, lambda m, law=law, mode=mode: _segment(m, args.steps, args.dt, law, mode))
             for name, (law, mode) in CASES.items()]
    cases.append(("pid", lambda m: _pid(m, args.steps, args.dt)))
    for name, fn in cases:
        tp, ep = best(lambda: fn(_kernels_py), args.repeat)
        row = f"{name:<18} {tp / args.steps * 1e9:>15.1f}"
        if compiled is not None:
            tc, ec = best(lambda: fn(compiled), args.repeat)
            diff = float(np.max(np.abs(ep - ec)))
            row += f" {tc / args.steps * 1e9:>15.1f} {tp / tc:>8.1f}x {diff:>11.2e}"
        print(row)
    return 0


if __name__ == "__main__":
    sys.exit(main())

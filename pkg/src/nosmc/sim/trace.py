"""Simulation records and their CSV form."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

HEADER = ("t", "e1", "e2", "sigma", "u", "d", "mode")
EVENT_KINDS = ("tc", "surfaceHit", "refJump", "gainUpdate", "reentry")


@dataclass(frozen=True)
class Event:
    kind: str
    t: float
    info: str = ""


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    t_end: float = 20.0
    integrator: str = "rk4"
    seed: int = 0
    event_tolerance: float = 1e-3
    #: stop this many seconds after the last switch instant (None: run to t_end)
    settle_window: float | None = None

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be > 0, got {self.t_end}")
        if self.integrator not in ("rk4", "euler"):
            raise ValueError(f"unknown integrator {self.integrator!r}")

    @property
    def steps(self):
        return int(round(self.t_end / self.dt))


@dataclass
class Trace:
    """Time series of one closed loop.

    ``mode`` holds strings (reaching, sliding, pid, pi).  ``x1``/``xd`` keep
    the plant output and the reference so tracking plots need no extra pass.
    """

    t: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    sigma: np.ndarray
    u: np.ndarray
    d: np.ndarray
    mode: np.ndarray
    events: list = field(default_factory=list)
    gains: list = field(default_factory=list)
    x1: np.ndarray | None = None
    xd: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    def events_of(self, kind):
        return [e for e in self.events if e.kind == kind]

    def first(self, kind):
        ev = self.events_of(kind)
        return ev[0].t if ev else None

    def duration(self):
        return float(self.t[-1] - self.t[0])

    def rows(self):
        for i in range(len(self.t)):
            yield (repr(float(self.t[i])), repr(float(self.e1[i])), repr(float(self.e2[i])),
                   repr(float(self.sigma[i])), repr(float(self.u[i])), repr(float(self.d[i])),
                   str(self.mode[i]))

    def write_csv(self, path, extra=None):
        """Write the trace; ``extra`` maps additional column names to arrays."""
        path = Path(path)
        extra = extra or {}
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(HEADER + tuple(extra))
            cols = [extra[k] for k in extra]
            for i, row in enumerate(self.rows()):
                w.writerow(row + tuple(repr(float(c[i])) for c in cols))
        return path

    def write_events(self, path):
        return write_events(self.events, path)


def write_events(events, path):
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("kind", "t"))
        for e in events:
            w.writerow((e.kind, repr(float(e.t))))
    return path


def read_csv(path):
    """Load a trace CSV into a dict of columns (mode stays a string column)."""
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = list(r)
    out = {}
    for j, name in enumerate(header):
        col = [row[j] for row in rows]
        out[name] = np.array(col) if name == "mode" else np.array(col, dtype=float)
    return out

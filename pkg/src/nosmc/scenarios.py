"""Scenario registry: the worked examples, the quadrotor mission and test beds.

A scenario is a complete, serialisable description of one closed-loop run.
Scalar scenarios round-trip through JSON with field names that mirror
:class:`ScenarioSpec`; the checked-in files under ``scenarios/`` are
generated from this module (``nosmc list --write-configs``).
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import references
from .control import ControllerSpec, PidGains
from .errors import InfeasibleBounds, UnknownScenario
from .gains import GainConfig
from .plant import Disturbance, NoiseModel, ScalarPlant, UavParams
from .sim.loop import run_scenario
from .sim.trace import SimConfig
from .sim.uav import ChannelLoop, UavMission, run_uav

DEFAULT_PID = PidGains(kp=2.0, ki=1.0, kd=1.0)
DEFAULT_PI = PidGains(kp=2.0, ki=1.0)


@dataclass(frozen=True)
class ScenarioSpec:
    """One scalar closed loop: plant, controller, reference, disturbance, solver settings."""

    name: str
    plant: ScalarPlant
    controller: ControllerSpec
    reference: dict
    disturbance: Disturbance | None = None
    sim: SimConfig = field(default_factory=SimConfig)
    noise: NoiseModel = field(default_factory=NoiseModel)
    description: str = ""

    kind = "scalar"

    @property
    def gain_config(self) -> GainConfig | None:
        return self.controller.config

    def build_reference(self):
        return references.build(self.reference)

    def initial_errors(self):
        xd, xd1, _ = self.build_reference().sample(0.0)
        e1 = xd - self.plant.x0[0]
        e2 = xd1 - self.plant.x0[1] if self.plant.order == 2 else 0.0
        return e1, e2

    def disturbance_budget(self):
        """sup|delta| + sup|xd''| over the run (what Ld has to cover)."""
        ref = self.build_reference()
        b = 0.0 if self.disturbance is None else self.disturbance.bound
        return b + ref.sup_d2(self.sim.t_end)

    def validate(self):
        cfg = self.gain_config
        if cfg is None or self.controller.kind in ("pid", "pi"):
            return self
        need = self.disturbance_budget()
        if need > cfg.Ld * (1 + 1e-9):
            raise InfeasibleBounds(f"{self.name}: Ld={cfg.Ld} does not cover sup|delta| + sup|xd''| = {need:.6g}")
        return self

    # ---- overrides -----------------------------------------------------
    def with_controller(self, kind):
        """Same plant and reference under another controller kind."""
        if kind == self.controller.kind:
            return self
        if kind in ("ideal", "smooth"):
            return replace(self, controller=replace(self.controller, kind=kind))
        pid = self.controller.pid or (DEFAULT_PID if kind == "pid" else DEFAULT_PI)
        plant = self.plant
        if kind == "pi" and plant.order != 1:
            plant = replace(plant, order=1, x0=(plant.x0[0], 0.0))
        if kind == "pid" and plant.order != 2:
            plant = replace(plant, order=2)
        return replace(self, controller=self.controller.with_kind(kind, pid), plant=plant)

    def with_initial_errors(self, e1=None, e2=None):
        xd, xd1, _ = self.build_reference().sample(0.0)
        x1, x2 = self.plant.x0
        if e1 is not None:
            x1 = xd - e1
        if e2 is not None:
            x2 = xd1 - e2
        return replace(self, plant=replace(self.plant, x0=(float(x1), float(x2))))

    def override(self, **kw):
        """Apply the sweepable overrides: dt, t_end, seed, rho, rho0, Ld, kc, e1, e2, controller."""
        spec = self
        if kw.get("controller"):
            spec = spec.with_controller(kw["controller"])
        sim = {k: kw[k] for k in ("dt", "t_end", "seed") if kw.get(k) is not None}
        if sim:
            spec = replace(spec, sim=replace(spec.sim, **sim))
        if kw.get("seed") is not None and spec.disturbance is not None and spec.disturbance.kind == "boundedRandom":
            spec = replace(spec, disturbance=Disturbance(
                "boundedRandom", {**spec.disturbance.params, "seed": int(kw["seed"])}))
        cfg = {}
        if kw.get("Ld") is not None:
            cfg["Ld"] = float(kw["Ld"])
        if kw.get("rho0") is not None:
            cfg["rho0"] = float(kw["rho0"])
        if cfg and spec.controller.config is not None:
            spec = replace(spec, controller=replace(spec.controller, config=replace(spec.controller.config, **cfg)))
        if kw.get("rho") is not None:
            spec = replace(spec, controller=replace(spec.controller, rho=float(kw["rho"])))
        if kw.get("kc") is not None:
            spec = replace(spec, controller=replace(spec.controller, kc=float(kw["kc"])))
        if kw.get("e1") is not None or kw.get("e2") is not None:
            spec = spec.with_initial_errors(kw.get("e1"), kw.get("e2"))
        return spec

    def run(self, kernel=None):
        return run_scenario(self.plant, self.controller, self.build_reference(), self.disturbance,
                            self.sim, noise=self.noise, kernel=kernel)

    # ---- serialisation -------------------------------------------------
    def to_dict(self):
        c = self.controller
        ctrl = {"kind": c.kind, "kc": c.kc, "e1c": c.e1c, "e2c": c.e2c, "schedule": c.schedule,
                "horizon": c.horizon, "rho": c.rho,
                "pid": None if c.pid is None else asdict(c.pid)}
        return {
            "name": self.name,
            "description": self.description,
            "plant": {"kind": "scalar", "x0": list(self.plant.x0), "h": dict(self.plant.h),
                      "order": self.plant.order},
            "controller": ctrl,
            "gainConfig": None if c.config is None else asdict(c.config),
            "reference": dict(self.reference),
            "disturbance": None if self.disturbance is None else self.disturbance.to_dict(),
            "noise": {"n1": self.noise.n1.to_dict(), "n2": self.noise.n2.to_dict()},
            "sim": asdict(self.sim),
        }

    @classmethod
    def from_dict(cls, d):
        p = d["plant"]
        c = dict(d["controller"])
        pid = c.pop("pid", None)
        cfg = d.get("gainConfig")
        controller = ControllerSpec(config=None if cfg is None else GainConfig(**cfg),
                                    pid=None if pid is None else PidGains(**pid), **c)
        noise = d.get("noise") or {}
        return cls(
            name=d["name"],
            description=d.get("description", ""),
            plant=ScalarPlant(x0=tuple(p["x0"]), h=p.get("h", {"kind": "zero"}), order=p.get("order", 2)),
            controller=controller,
            reference=d["reference"],
            disturbance=None if d.get("disturbance") is None else Disturbance.from_dict(d["disturbance"]),
            noise=NoiseModel(
                n1=Disturbance.from_dict(noise["n1"]) if "n1" in noise else Disturbance.zero(),
                n2=Disturbance.from_dict(noise["n2"]) if "n2" in noise else Disturbance.zero(),
            ),
            sim=SimConfig(**d.get("sim", {})),
        )


def _loop_dict(loop: ChannelLoop):
    return {"gainConfig": asdict(loop.config), "kc": loop.kc, "e1c": loop.e1c, "e2c": loop.e2c,
            "smooth": loop.smooth, "time_scale": loop.time_scale}


def _loop_from(d):
    d = dict(d)
    return ChannelLoop(config=GainConfig(**d.pop("gainConfig")), **d)


@dataclass(frozen=True)
class UavScenarioSpec:
    """Quadrotor mission: a path description plus the two loop groups."""

    name: str
    path: dict
    position: ChannelLoop
    attitude: ChannelLoop
    x0: tuple
    disturbances: dict
    params: UavParams = field(default_factory=UavParams)
    dt: float = 1e-3
    t_end: float = 30.0
    event_tolerance: float = 5e-3
    description: str = ""

    kind = "uav"

    @property
    def gain_config(self):
        return self.position.config

    def mission(self) -> UavMission:
        refs = {a: references.mission(a, **self.path) for a in "xyz"}
        return UavMission(references=refs, position=self.position, attitude=self.attitude,
                          params=self.params, x0=tuple(self.x0),
                          disturbances={k: v for k, v in self.disturbances.items()},
                          dt=self.dt, t_end=self.t_end, event_tolerance=self.event_tolerance)

    def validate(self):
        m = self.mission()
        bounds = m.delta_bound
        for ch in ("x", "y", "z"):
            need = bounds[ch] + m.references[ch].sup_d2(self.t_end)
            if need > self.position.config.Ld:
                raise InfeasibleBounds(f"{self.name}: Ld does not cover channel {ch} ({need:.4g})")
        return self

    def override(self, **kw):
        if kw.get("controller") not in (None, "smooth", "ideal"):
            raise ValueError("the quadrotor mission only runs the sliding controllers")
        spec = self
        if kw.get("controller"):
            smooth = kw["controller"] == "smooth"
            spec = replace(spec, position=replace(spec.position, smooth=smooth),
                           attitude=replace(spec.attitude, smooth=smooth))
        if kw.get("dt") is not None:
            spec = replace(spec, dt=float(kw["dt"]))
        if kw.get("t_end") is not None:
            spec = replace(spec, t_end=float(kw["t_end"]))
        if kw.get("rho0") is not None:
            spec = replace(spec, position=replace(
                spec.position, config=replace(spec.position.config, rho0=float(kw["rho0"]))))
        return spec

    def run(self, kernel=None):
        return run_uav(self.mission())

    def to_dict(self):
        return {
            "name": self.name,
            "description": self.description,
            "plant": {"kind": "uav", **asdict(self.params)},
            "path": dict(self.path),
            "position": _loop_dict(self.position),
            "attitude": _loop_dict(self.attitude),
            "x0": list(self.x0),
            "disturbances": {k: v.to_dict() for k, v in self.disturbances.items()},
            "sim": {"dt": self.dt, "t_end": self.t_end, "event_tolerance": self.event_tolerance},
        }

    @classmethod
    def from_dict(cls, d):
        p = dict(d["plant"])
        p.pop("kind")
        return cls(
            name=d["name"], description=d.get("description", ""), path=d["path"],
            position=_loop_from(d["position"]), attitude=_loop_from(d["attitude"]),
            x0=tuple(d["x0"]),
            disturbances={k: Disturbance.from_dict(v) for k, v in d["disturbances"].items()},
            params=UavParams(**p), **d.get("sim", {}),
        )


# --------------------------------------------------------------------------
# registry


def example41(seed=0):
    cfg = GainConfig(Ld=5.0, k2M=20.0, rho_c0=50.0, rho0=20.0)
    return ScenarioSpec(
        name="example41",
        description="double integrator, e(0)=(100,-10), d=3+2sin(0.3t)sin(1.6t), ideal law",
        plant=ScalarPlant(x0=(-100.0, 10.0)),
        controller=ControllerSpec("ideal", cfg, kc=6.0, e1c=2.0, e2c=5.0),
        reference={"kind": "constant", "value": 0.0},
        disturbance=Disturbance.sinusoidal_product(3.0, 2.0, 0.3, 1.6),
        sim=SimConfig(dt=1e-4, t_end=40.0, seed=seed),
    )


def example42(seed=0):
    base = example41(seed)
    return replace(base, name="example42",
                   description="example41 with the tanh-smoothed laws",
                   controller=replace(base.controller, kind="smooth"),
                   sim=replace(base.sim, dt=1e-3))


def example61(seed=0):
    cfg = GainConfig(Ld=1.62, k2M=10.0, rho_c0=20.0, rho0=20.0, beta13=2.0)
    return ScenarioSpec(
        name="example61",
        description="tracking xd=2+0.5sin(0.8t) with h=5 x1^(1/3) sin(0.5t), ideal law",
        plant=ScalarPlant(x0=(10.0, -1.0), h={"kind": "cubeRootSine", "gain": 5.0, "w": 0.5}),
        controller=ControllerSpec("ideal", cfg, kc=2.5, e1c=1.0, e2c=2.0),
        reference={"kind": "sine", "offset": 2.0, "amp": 0.5, "w": 0.8},
        disturbance=Disturbance.sinusoidal_product(1.0, 0.3, 0.3, 1.6),
        sim=SimConfig(dt=1e-4, t_end=30.0, seed=seed),
    )


def example62(seed=0):
    base = example61(seed)
    return replace(base, name="example62",
                   description="example61 with the tanh-smoothed laws",
                   controller=replace(base.controller, kind="smooth"),
                   sim=replace(base.sim, dt=1e-3))


def noise_filter(seed=0):
    """Terminal phase under 50 rad/s position-measurement noise.

    ``Ld`` covers the disturbance plus the ``k1 * A * omega`` rate the noise
    injects into the measured sliding variable.
    """
    cfg = GainConfig(Ld=6.0, k2M=20.0, rho_c0=20.0, rho0=20.0, beta13=1.0)
    return ScenarioSpec(
        name="noise-filter",
        description="ideal law on the surface with sinusoidal position noise (omega=50)",
        plant=ScalarPlant(x0=(-0.5, 0.0)),
        controller=ControllerSpec("ideal", cfg, kc=7.0, e1c=1.0, e2c=2.0),
        reference={"kind": "constant", "value": 0.0},
        disturbance=Disturbance.constant(0.5),
        noise=NoiseModel(n1=Disturbance.sine(0.1, 50.0)),
        sim=SimConfig(dt=1e-4, t_end=16.0, seed=seed),
    )


MC_CONFIG = GainConfig(Ld=5.0, k2M=30.0, rho_c0=50.0, rho0=20.0)
MC_SMOOTH_RHO0 = 500.0


def random_disturbance(rng: np.random.Generator, Ld, seed):
    """One of the disturbance families, scaled so that sup|d| <= Ld."""
    kind = rng.choice(["constant", "sine", "sinusoidalProduct", "boundedRandom", "gust"])
    if kind == "constant":
        return Disturbance.constant(rng.uniform(-Ld, Ld))
    if kind == "sine":
        amp = rng.uniform(0.1, 1.0) * Ld
        off = rng.uniform(-1, 1) * (Ld - amp)
        return Disturbance.sine(amp, rng.uniform(0.1, 5.0), rng.uniform(0, 2 * np.pi), off)
    if kind == "sinusoidalProduct":
        amp = rng.uniform(0.1, 0.9) * Ld
        off = rng.uniform(-1, 1) * (Ld - amp)
        return Disturbance.sinusoidal_product(off, amp, rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0),
                                              rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi))
    if kind == "boundedRandom":
        amp = rng.uniform(0.2, 1.0) * Ld
        off = rng.uniform(-1, 1) * (Ld - amp)
        return Disturbance.bounded_random(amp, hold=rng.uniform(0.05, 1.0), seed=seed, offset=off)
    amp = rng.uniform(-1, 1) * Ld
    off = rng.uniform(-1, 1) * (Ld - abs(amp))
    return Disturbance.gust(amp, rng.uniform(0, 10), rng.uniform(0.5, 5), off)


def monte_carlo(seed=0, kind="ideal"):
    """Random initial errors in [-100, 100]^2 and a random bounded disturbance."""
    rng = np.random.default_rng(seed)
    e1, e2 = rng.uniform(-100, 100, size=2)
    d = random_disturbance(rng, MC_CONFIG.Ld, seed)
    cfg = MC_CONFIG if kind == "ideal" else replace(MC_CONFIG, rho0=MC_SMOOTH_RHO0)
    kc, e1c, e2c = 10.0, 4.0, 10.0
    dt = 1e-4
    return ScenarioSpec(
        name=f"monte-carlo-{kind}",
        description="randomised non-overshoot case (seeded)",
        plant=ScalarPlant(x0=(-float(e1), -float(e2))),
        controller=ControllerSpec(kind, cfg, kc=kc, e1c=e1c, e2c=e2c, schedule=True, horizon=2.0),
        reference={"kind": "constant", "value": 0.0},
        disturbance=d,
        sim=SimConfig(dt=dt, t_end=40.0, seed=seed, settle_window=12.0),
    )


UAV_POSITION = ChannelLoop(GainConfig(Ld=4.5, k2M=10.0, rho_c0=6.0, rho0=10.0, beta13=2.0),
                           kc=5.5, e1c=1.0, e2c=1.2)
UAV_ATTITUDE = ChannelLoop(GainConfig(Ld=2.0, k2M=12.0, rho_c0=6.0, rho0=3.0, beta13=2.0),
                           kc=5.5, e1c=1.0, e2c=1.2, time_scale=25.0)


def uav_mission(seed=0):
    dist = {
        "x": Disturbance.sine(0.5, 0.5),
        "y": Disturbance.sine(0.5, 0.4, 1.0),
        "z": Disturbance.sine(0.3, 0.7),
        "psi": Disturbance.sine(0.01, 1.0),
        "theta": Disturbance.sine(0.01, 1.3),
        "phi": Disturbance.sine(0.01, 0.9),
    }
    return UavScenarioSpec(
        name="uav-mission",
        description="hover 1 m, glide along -x, then climb to 2.5 m and circle (r=5 m); jump at t=6 s",
        path={"hover": [0.0, 0.0, 1.0], "line_start": 3.0, "line_duration": 3.0, "line_dx": -1.5,
              "circle_start": 6.0, "radius": 5.0, "omega": 0.3, "ramp": 4.0, "z_circle": 2.5},
        position=UAV_POSITION,
        attitude=UAV_ATTITUDE,
        x0=(0.3, 0.2, 0.05, 0.0, 0.0, 0.0, -0.02, -0.01, 0.01, 0.0, 0.0, 0.0),
        disturbances=dist,
    )


REGISTRY = {
    "example41": example41,
    "example42": example42,
    "example61": example61,
    "example62": example62,
    "noise-filter": noise_filter,
    "monte-carlo-ideal": lambda seed=0: monte_carlo(seed, "ideal"),
    "monte-carlo-smooth": lambda seed=0: monte_carlo(seed, "smooth"),
    "uav-mission": uav_mission,
}


def names():
    return list(REGISTRY)


def get(name, seed=0):
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise UnknownScenario(f"unknown scenario {name!r}; known: {', '.join(REGISTRY)}") from None
    return factory(seed)


def from_dict(d):
    if d.get("plant", {}).get("kind") == "uav":
        return UavScenarioSpec.from_dict(d)
    return ScenarioSpec.from_dict(d)


def load(path):
    """Read a scenario file (JSON mirroring the spec's field names)."""
    return from_dict(json.loads(Path(path).read_text()))


def save(spec, path):
    path = Path(path)
    path.write_text(json.dumps(spec.to_dict(), indent=2) + "\n")
    return path


def write_configs(directory):
    """Write every fixed scenario to ``directory/<name>.json``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return [save(get(n), directory / f"{n}.json") for n in names()]


__all__ = [
    "ScenarioSpec", "UavScenarioSpec", "REGISTRY", "names", "get", "load", "save", "from_dict",
    "write_configs", "monte_carlo", "random_disturbance", "DEFAULT_PID", "DEFAULT_PI",
]

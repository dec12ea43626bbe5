import json
from dataclasses import replace
from pathlib import Path

import pytest

from nosmc import scenarios
from nosmc.errors import InfeasibleBounds, UnknownScenario
from nosmc.plant import Disturbance

CONFIG_DIR = Path(__file__).resolve().parents[1] / "scenarios"


@pytest.mark.parametrize("name", scenarios.names())
def test_shipped_config_matches_registry(name):
    on_disk = json.loads((CONFIG_DIR / f"{name}.json").read_text())
    assert on_disk == json.loads(json.dumps(scenarios.get(name).to_dict()))


@pytest.mark.parametrize("name", scenarios.names())
def test_round_trip(name, tmp_path):
    spec = scenarios.get(name)
    back = scenarios.load(scenarios.save(spec, tmp_path / "s.json"))
    assert back.to_dict() == spec.to_dict()
    assert back.kind == spec.kind


@pytest.mark.parametrize("name", scenarios.names())
def test_registered_scenarios_are_feasible(name):
    scenarios.get(name).validate()


def test_unknown_name():
    with pytest.raises(UnknownScenario):
        scenarios.get("example99")


def test_validate_catches_undersized_Ld():
    spec = scenarios.get("example41")
    loud = replace(spec, disturbance=Disturbance.constant(9.0))
    with pytest.raises(InfeasibleBounds):
        loud.validate()


def test_disturbance_budget_includes_reference():
    spec = scenarios.get("example61")
    # 1 + 0.3 from the disturbance and 0.5 * 0.8^2 from the reference
    assert spec.disturbance_budget() == pytest.approx(1.62)


def test_with_controller_swaps_plant_order():
    spec = scenarios.get("example41")
    pi = spec.with_controller("pi")
    assert pi.plant.order == 1 and pi.controller.pid == scenarios.DEFAULT_PI
    pid = pi.with_controller("pid")
    assert pid.plant.order == 2 and pid.controller.pid == scenarios.DEFAULT_PI
    assert spec.with_controller("ideal") is spec
    assert spec.with_controller("smooth").controller.kind == "smooth"


def test_overrides():
    spec = scenarios.get("example62").override(dt=1e-2, t_end=5.0, rho=8.0, Ld=1.7, kc=3.0, e1=0.5, e2=-1.0)
    assert (spec.sim.dt, spec.sim.t_end) == (1e-2, 5.0)
    assert spec.controller.rho == 8.0 and spec.controller.kc == 3.0
    assert spec.gain_config.Ld == 1.7
    assert spec.initial_errors() == pytest.approx((0.5, -1.0))


def test_seed_reaches_random_disturbance():
    a = scenarios.get("monte-carlo-ideal", seed=3)
    b = scenarios.get("monte-carlo-ideal", seed=3)
    c = scenarios.get("monte-carlo-ideal", seed=4)
    assert a == b and a.plant.x0 != c.plant.x0
    for s in range(20):
        spec = scenarios.get("monte-carlo-smooth", seed=s)
        assert spec.disturbance.bound <= scenarios.MC_CONFIG.Ld + 1e-12
        assert max(abs(v) for v in spec.initial_errors()) <= 100


def test_uav_override():
    spec = scenarios.get("uav-mission").override(controller="ideal", dt=2e-3, t_end=1.0, rho0=5.0)
    assert not spec.position.smooth and not spec.attitude.smooth
    assert (spec.dt, spec.t_end, spec.position.config.rho0) == (2e-3, 1.0, 5.0)
    with pytest.raises(ValueError):
        spec.override(controller="pid")


def test_write_configs(tmp_path):
    paths = scenarios.write_configs(tmp_path / "cfg")
    assert sorted(p.stem for p in paths) == sorted(scenarios.names())

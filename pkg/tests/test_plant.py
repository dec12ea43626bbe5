import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nosmc.errors import InfeasibleThrust, SingularAttitude
from nosmc.plant import (
    Disturbance,
    NoiseModel,
    ScalarPlant,
    UavParams,
    allocate,
    cube_root,
    forward_rotors,
    forward_translation,
    inputs_from_rotors,
    measure,
    mixer,
    sum_bound,
    uav_rhs,
)

P = UavParams()

DISTURBANCES = [
    Disturbance.constant(-1.5),
    Disturbance.sinusoidal_product(3.0, 2.0, 0.3, 1.6),
    Disturbance.sine(0.5, 2.0, offset=0.1),
    Disturbance.bounded_random(0.8, hold=0.1, seed=4),
    Disturbance.gust(1.2, 2.0, 1.0, offset=-0.2),
]


@pytest.mark.parametrize("d", DISTURBANCES, ids=lambda d: d.kind)
def test_disturbance_never_exceeds_its_bound(d):
    t = np.linspace(0, 30, 30001)
    assert np.max(np.abs(d(t))) <= d.bound + 1e-12


@pytest.mark.parametrize("d", DISTURBANCES, ids=lambda d: d.kind)
def test_disturbance_scalar_matches_array_and_round_trips(d):
    t = np.array([0.0, 0.37, 2.5, 11.0])
    assert [d(float(x)) for x in t] == pytest.approx(list(d(t)))
    assert Disturbance.from_dict(d.to_dict()) == d


def test_disturbance_values():
    d = Disturbance.sinusoidal_product(3.0, 2.0, 0.3, 1.6)
    assert d(1.0) == pytest.approx(3 + 2 * math.sin(0.3) * math.sin(1.6))
    assert d.bound == 5.0
    g = Disturbance.gust(2.0, 1.0, 2.0)
    assert (g(0.5), g(2.0), g(3.5)) == (0.0, pytest.approx(2.0), 0.0)
    assert sum_bound(d, g) == 7.0


def test_random_disturbance_is_reproducible():
    a = Disturbance.bounded_random(1.0, seed=7)
    b = Disturbance.bounded_random(1.0, seed=7)
    c = Disturbance.bounded_random(1.0, seed=8)
    t = np.linspace(0, 5, 101)
    assert np.array_equal(a(t), b(t))
    assert not np.array_equal(a(t), c(t))


def test_unknown_disturbance_kind():
    with pytest.raises(ValueError):
        Disturbance("pink")


def test_noise_measurement():
    nm = NoiseModel(n1=Disturbance.constant(0.1))
    assert not nm.is_zero and NoiseModel().is_zero
    assert measure(1.0, 2.0, nm, 0.0) == (pytest.approx(1.1), 2.0)


def test_scalar_plant_orders():
    p2 = ScalarPlant(h={"kind": "cubeRootSine", "gain": 5.0, "w": 0.5})
    x1, t = 8.0, 1.0
    assert p2.rhs(t, (x1, 3.0), 1.0, 0.5) == (3.0, pytest.approx(5 * 2 * math.sin(0.5) + 0.5))
    p1 = ScalarPlant(x0=(0.0,), order=1)
    assert p1.rhs(0.0, (2.0,), 1.0, 0.25) == (0.75,)
    with pytest.raises(ValueError):
        ScalarPlant(order=3)
    with pytest.raises(ValueError):
        ScalarPlant(h={"kind": "warp"})


def test_cube_root_odd():
    assert cube_root(-27.0) == pytest.approx(-3.0)


# ---- quadrotor -------------------------------------------------------------


def test_hover_is_an_equilibrium():
    F, theta, phi = allocate(0.0, 0.0, P.g, 0.0, P)
    assert (F, theta, phi) == (pytest.approx(P.m * P.g), 0.0, 0.0)
    Fi = mixer(F, 0.0, 0.0, 0.0, P)
    assert Fi == pytest.approx([P.m * P.g / 4] * 4)
    s = np.zeros(12)
    s[2] = 1.0
    ds = uav_rhs(s, inputs_from_rotors(Fi, s, P), P)
    assert np.allclose(ds, 0.0, atol=1e-12)


@given(st.floats(-4, 4), st.floats(-4, 4), st.floats(2, 20), st.floats(-math.pi, math.pi))
def test_allocate_then_forward_reproduces_demand(ux, uy, uz, psi):
    F, theta, phi = allocate(ux, uy, uz, psi, P)
    assert forward_translation(F, psi, theta, phi, P) == pytest.approx((ux, uy, uz), abs=1e-9)


def test_allocate_rejects_bad_demands():
    with pytest.raises(SingularAttitude):
        allocate(0.0, 0.0, -1.0, 0.0, P)
    with pytest.raises(SingularAttitude):
        allocate(100.0, 0.0, 1.0, 0.0, P)


@given(st.floats(5, 40), st.floats(-0.01, 0.01), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_mixer_inverts_forward_map(F, upsi, uth, uph):
    Fi = mixer(F, upsi, uth, uph, P, strict=False)
    assert forward_rotors(Fi, P) == pytest.approx([F, upsi, uth, uph], abs=1e-9)


def test_mixer_flags_negative_rotor_force():
    with pytest.raises(InfeasibleThrust) as ei:
        mixer(1.0, 0.0, 5.0, 0.0, P)
    assert ei.value.forces is not None and np.any(ei.value.forces < 0)


def test_uav_drag_and_disturbance_enter_rates():
    s = np.zeros(12)
    s[6] = 2.0  # x velocity
    ds = uav_rhs(s, np.zeros(6), P, dist={"x": Disturbance.constant(1.0)})
    assert ds[0] == 2.0
    assert ds[6] == pytest.approx((-0.1 * 2.0 + 1.0) / P.m)
    assert ds[8] == pytest.approx(-P.g)


def test_params_validation():
    with pytest.raises(ValueError):
        UavParams(m=0.0)

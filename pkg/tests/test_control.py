import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nosmc.control import (
    REACHING,
    SLIDING,
    ControllerSpec,
    PidGains,
    Reference,
    Segment,
    enter_sliding,
    ideal_control,
    initial_state,
    on_reference_jump,
    pi_control,
    pid_control,
    pid_stable,
)
from nosmc.gains import GainConfig, select_reach_params
from nosmc.sliding import ErrorState

CFG = GainConfig(Ld=5.0, k2M=20.0, rho_c0=50.0, rho0=20.0)
REACH = select_reach_params(CFG, 6.0, 2.0, 5.0)


def _steps():
    return Reference([Segment.hold(0.0, 1.0), Segment.hold(2.0, 3.0),
                      Segment(5.0, lambda t: 2 * t, lambda t: 2 + 0 * t, lambda t: 0 * t)])


def test_reference_sampling_and_jumps():
    r = _steps()
    assert r.jump_times == [2.0, 5.0]
    assert r.sample(1.0) == (1.0, 0.0, 0.0)
    assert r.sample(2.0) == (3.0, 0.0, 0.0)  # the jump instant belongs to the new piece
    xd, d1, _ = r.sample(np.array([0.5, 4.0, 6.0]))
    assert list(xd) == [1.0, 3.0, 12.0] and list(d1) == [0.0, 0.0, 2.0]
    assert r.jump(2.0) == (2.0, 0.0)
    assert r.jump(5.0) == (7.0, 2.0)


def test_reference_requires_sorted_starts():
    with pytest.raises(ValueError):
        Reference([Segment.hold(1.0, 0.0), Segment.hold(0.5, 1.0)])


def test_sup_d2():
    r = Reference.smooth(np.sin, np.cos, lambda t: -np.sin(t))
    assert r.sup_d2(10.0) == pytest.approx(1.0, abs=1e-6)
    assert Reference.constant(2.0).sup_d2(10.0) == 0.0


def test_enter_sliding_freezes_gains():
    cs = initial_state(REACH)
    assert cs.mode == REACHING and cs.gains.kc == 6.0
    cs = enter_sliding(cs, ErrorState(2.0, -5.0), CFG, 19.3, smooth=False)
    assert cs.mode == SLIDING and cs.tc_event == 19.3
    assert (cs.gains.k1, cs.gains.k2) == (pytest.approx(1.25), pytest.approx(16.875))


def test_reference_jump_large_error_restarts_reaching():
    cs = enter_sliding(initial_state(REACH), ErrorState(2.0, -5.0), CFG, 1.0)
    after = on_reference_jump(cs, ErrorState(4.0, 0.0), CFG, 3.0)
    assert after.mode == REACHING and after.tc_event is None


def test_reference_jump_small_error_redetermines_gains():
    cs = enter_sliding(initial_state(REACH), ErrorState(2.0, -5.0), CFG, 1.0)
    after = on_reference_jump(cs, ErrorState(1.0, -2.0), CFG, 3.0)
    assert after.mode == SLIDING and after.tc_event == 3.0
    assert after.gains.k1 == pytest.approx(1.0)
    assert after.gains.k2 != cs.gains.k2


def test_control_laws_subtract_drift():
    cs = enter_sliding(initial_state(REACH), ErrorState(2.0, -5.0), CFG, 1.0, smooth=False)
    assert ideal_control(ErrorState(1.0, -1.0), cs.gains, 2.0) == pytest.approx(16.875 - 2.0)
    assert pid_control(1.0, 2.0, 3.0, PidGains(2.0, 1.0, 1.0), 0.5) == 6.5
    assert pi_control(1.0, 3.0, 2.0, 1.0, 0.5) == 4.5


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(-10, 10))
def test_pid_stable_agrees_with_polynomial_roots(kp, ki, kd):
    roots = np.roots([1.0, kd, kp, ki])
    margin = np.max(roots.real)
    if abs(margin) < 1e-6:  # marginal cases are decided by rounding
        return
    assert pid_stable(kp, ki, kd) == (margin < 0)


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_pi_stable_agrees_with_polynomial_roots(kp, ki):
    margin = np.max(np.roots([1.0, kp, ki]).real)
    if abs(margin) < 1e-6:
        return
    assert pid_stable(kp, ki, order=2) == (margin < 0)


def test_pid_stable_order_check():
    with pytest.raises(ValueError):
        pid_stable(1, 1, 1, order=4)


def test_controller_spec_validation():
    with pytest.raises(ValueError):
        ControllerSpec(kind="lqr")
    with pytest.raises(ValueError):
        ControllerSpec(kind="smooth")
    with pytest.raises(ValueError):
        ControllerSpec(kind="pid")
    spec = ControllerSpec(kind="ideal", config=CFG, kc=6.0)
    assert not spec.smooth
    pid = spec.with_kind("pid", PidGains(2, 1, 1))
    assert pid.kind == "pid" and pid.config is CFG

import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from nosmc.errors import GainCeilingExceeded, InfeasibleBounds, InvalidGain, SaturatedGain
from nosmc.gains import (
    GainConfig,
    ReachParams,
    SwitchErrors,
    Zone,
    classify_zone,
    cubic_term,
    determine_gains,
    determine_k1,
    determine_k2,
    determine_rho,
    e2_max,
    k2_lower_bound,
    log_ratio,
    rho_c_for,
    schedule_reach,
    select_reach_params,
    validate_conditions,
)

EX41 = GainConfig(Ld=5.0, k2M=20.0, rho_c0=50.0, rho0=20.0)
EX62 = GainConfig(Ld=1.62, k2M=10.0, rho_c0=20.0, rho0=20.0, beta13=2.0)
FLIGHT = GainConfig(Ld=4.5, k2M=8.0, rho_c0=6.0, rho0=3.0, beta13=2.0)


# ---- frozen oracle values -------------------------------------------------


def test_example41_switch_errors_give_hand_values():
    reach = select_reach_params(EX41, 6.0, 2.0, 5.0)
    g = determine_gains(SwitchErrors(2.0, -5.0), reach, EX41, smooth=False)
    # k1 = 0.5 * 5/2, k2 = 1.5 * max(1.25*5 + 5, 25/4 + 5)
    assert g.k1 == pytest.approx(1.25, abs=1e-12)
    assert g.k2 == pytest.approx(16.875, abs=1e-12)
    assert g.rho is None


def test_reaching_steepness_closed_form():
    assert rho_c_for(6.0, 5.0, 50.0) == pytest.approx(25 * math.log(11), rel=1e-12)
    assert rho_c_for(6.0, 5.0, 50.0) == pytest.approx(59.9474, abs=1e-4)
    assert rho_c_for(2.5, 1.62, 20.0) == pytest.approx(15.4369, abs=1e-4)


def test_zero_disturbance_reaching_steepness():
    assert rho_c_for(3.0, 0.0, 8.0) == 4.0


def test_example62_gains():
    reach = select_reach_params(EX62, 2.5, 1.0, 2.0)
    g = determine_gains(SwitchErrors(1.0, -2.0), reach, EX62)
    assert g.k1 == pytest.approx(1.0)
    assert g.k2 == pytest.approx(5.43)
    # rho = 20 * ln((5.43 + 2 + 1.62) / (5.43 - 2 - 1.62)) = 20 ln 5
    assert g.rho == pytest.approx(20 * math.log(5), rel=1e-12)
    assert g.rho_c == pytest.approx(15.4369, abs=1e-4)


@pytest.mark.parametrize("e, k2", [((0.95, -0.01), 7.700), ((-0.3, 0.02), 7.051), ((-0.2, 0.01), 6.950)])
def test_flight_group_gains(e, k2):
    reach = select_reach_params(FLIGHT, 5.5, 1.0, 1.2)
    g = determine_gains(SwitchErrors(*e), reach, FLIGHT)
    assert g.k1 == 1.0
    assert g.k2 == pytest.approx(k2, abs=1e-3)


def test_flight_group_steepness():
    assert rho_c_for(5.5, 4.5, 6.0) == pytest.approx(3 * math.log(10), rel=1e-12)
    assert rho_c_for(5.5, 4.5, 6.0) == pytest.approx(6.908, abs=1e-3)


def test_flight_group_terminal_steepness():
    reach = select_reach_params(FLIGHT, 5.5, 1.0, 1.2)
    g = determine_gains(SwitchErrors(-0.3, 0.02), reach, FLIGHT)
    em = e2_max(SwitchErrors(-0.3, 0.02), 1.0)
    assert g.rho == pytest.approx(3 * math.log((g.k2 + em + 4.5) / (g.k2 - em - 4.5)), rel=1e-12)
    assert g.rho == pytest.approx(4.83, abs=0.01)


def test_cubic_term_value():
    # k1/3 * (|e1| + sqrt(e1^2 + 3 (e2/k1)^2)) with e = (3, 4), k1 = 2
    assert cubic_term(SwitchErrors(3.0, 4.0), 2.0) == pytest.approx(2 / 3 * (3 + math.sqrt(21)))


def test_log_ratio_and_saturation():
    assert log_ratio(1.0, 10.0, 2.0, 3.0) == pytest.approx(math.log(15 / 5))
    with pytest.raises(SaturatedGain):
        log_ratio(1.0, 5.0, 2.0, 3.0)


# ---- zones ---------------------------------------------------------------


@pytest.mark.parametrize(
    "e, zone",
    [
        ((1.0, -2.0), Zone.II_2),
        ((2.0, -1.0), Zone.II_1),
        ((-1.0, 2.0), Zone.IV_2),
        ((-2.0, 1.0), Zone.IV_1),
        ((1.0, 2.0), Zone.I_1),
        ((2.0, 1.0), Zone.I_2),
        ((-1.0, -2.0), Zone.III_1),
        ((-2.0, -1.0), Zone.III_2),
        ((0.0, 0.0), Zone.ORIGIN),
        ((1.0, 0.0), Zone.I_2),
        ((0.0, 1.0), Zone.I_1),
        ((-1.0, 0.0), Zone.III_2),
        ((0.0, -1.0), Zone.III_1),
    ],
)
def test_zone_table(e, zone):
    assert classify_zone(SwitchErrors(*e)) is zone
    assert str(zone) == zone.value


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@given(finite, finite)
def test_zone_mirror_symmetry(e1, e2):
    e = SwitchErrors(e1, e2)
    assume(not (e1 == 0 or e2 == 0))  # axes belong to the I/III closures
    assert classify_zone(-e) is classify_zone(e).mirror


# ---- pipeline properties ---------------------------------------------------

errs = st.tuples(st.floats(-5, 5), st.floats(-5, 5)).filter(lambda t: abs(t[0]) > 1e-3 and abs(t[1]) > 1e-3)


@given(errs)
def test_k1_inside_its_interval_or_floored(e):
    s = SwitchErrors(*e)
    k1 = determine_k1(s, EX41)
    ratio = abs(s.e2) / abs(s.e1)
    if s.opposing and abs(s.e1) < abs(s.e2):
        assert 0 < k1 < ratio or (k1 == 1.0 and ratio > 1)
    elif s.opposing:
        assert k1 > ratio
    else:
        assert k1 == max(EX41.beta13, 1.0)


@given(errs)
def test_k2_clears_bound_or_raises(e):
    s = SwitchErrors(*e)
    cfg = GainConfig(Ld=1.0, k2M=30.0)
    k1 = determine_k1(s, cfg)
    try:
        k2 = determine_k2(s, k1, cfg)
    except GainCeilingExceeded:
        assert cfg.beta2 * k2_lower_bound(s, k1, cfg.Ld) > cfg.k2M
        return
    assert k2 > k2_lower_bound(s, k1, cfg.Ld)
    assert k2 <= cfg.k2M


@given(errs, st.booleans())
def test_gains_invariant_under_reflection(e, smooth):
    s = SwitchErrors(*e)
    cfg = GainConfig(Ld=1.0, k2M=1e6)
    reach = select_reach_params(cfg, 2.0, 1.0, 2.0)
    a = determine_gains(s, reach, cfg, smooth=smooth)
    b = determine_gains(-s, reach, cfg, smooth=smooth)
    assert a == b


@given(errs)
def test_pipeline_output_passes_its_own_conditions(e):
    s = SwitchErrors(*e)
    cfg = GainConfig(Ld=1.0, k2M=1e6)
    reach = select_reach_params(cfg, 2.0, 1.0, 2.0)
    g = determine_gains(s, reach, cfg)
    rep = validate_conditions(g, s, cfg)
    assert rep.ok, str(rep)


@given(errs)
def test_rho_meets_its_lower_bound(e):
    s = SwitchErrors(*e)
    cfg = GainConfig(Ld=1.0, k2M=1e6, rho0=1.5)
    k1 = determine_k1(s, cfg)
    k2 = determine_k2(s, k1, cfg)
    em, rho = determine_rho(s, k1, k2, cfg)
    need = max(1 / (2 * k1), 1) * log_ratio(k1, k2, em, cfg.Ld)
    assert rho >= need


# ---- degenerate and error paths ------------------------------------------------


def test_origin_gets_floors():
    reach = select_reach_params(EX41, 6.0, 2.0, 5.0)
    g = determine_gains(SwitchErrors(0.0, 0.0), reach, EX41)
    assert g.k2 == pytest.approx(1.5 * 5.0 + 1e-6)
    assert g.rho >= 1.0
    assert validate_conditions(g, SwitchErrors(0.0, 0.0), EX41).ok


def test_origin_keeps_previous_gains():
    reach = select_reach_params(EX41, 6.0, 2.0, 5.0)
    prev = determine_gains(SwitchErrors(2.0, -5.0), reach, EX41)
    g = determine_gains(SwitchErrors(0.0, 0.0), reach, EX41, previous=prev)
    assert (g.k1, g.k2, g.rho) == (prev.k1, prev.k2, prev.rho)


def test_ceiling_raises():
    with pytest.raises(GainCeilingExceeded):
        determine_k2(SwitchErrors(0.1, -10.0), 1.0, EX41)


def test_reach_parameter_validation():
    with pytest.raises(InvalidGain):
        select_reach_params(EX41, 4.0)
    with pytest.raises(InfeasibleBounds):
        select_reach_params(EX41, 6.0, e1c=20.0)
    with pytest.raises(InfeasibleBounds):
        select_reach_params(EX41, 6.0, e1c=2.0, e2c=6.0)
    with pytest.raises(InfeasibleBounds):
        select_reach_params(GainConfig(Ld=5.0, k2M=4.0), 6.0)


def test_reach_defaults_sit_on_their_ceilings():
    r = select_reach_params(EX41, 6.0)
    assert r.e1c == 7.5
    assert r.e2c == pytest.approx(math.sqrt(15 * 7.5))


@pytest.mark.parametrize("kw", [dict(beta11=1.0), dict(beta12=1.0), dict(beta2=1.0), dict(rho0=1.0), dict(Ld=-1)])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        GainConfig(**{"Ld": 1.0, "k2M": 5.0, **kw})


def test_schedule_raises_kc_for_fast_approach():
    e0 = SwitchErrors(50.0, -40.0)
    r = schedule_reach(EX41, e0, 6.0, 2.0, 5.0)
    room = 0.5 * (50 - 2)
    assert r.kc == pytest.approx(5 + (40 ** 2 - 25) / (2 * room))
    assert r.rho_c == pytest.approx(rho_c_for(r.kc, 5.0, 50.0))


def test_schedule_shrinks_e1c_when_tc0_gains_break_ceiling():
    e0 = SwitchErrors(1.0, -9.0)
    r = schedule_reach(EX41, e0, 6.0, 2.0, 5.0)
    assert r.e1c == pytest.approx(0.5)


def test_schedule_horizon_reverses_diverging_velocity():
    e0 = SwitchErrors(30.0, 40.0)
    r = schedule_reach(EX41, e0, 6.0, 2.0, 5.0, horizon=2.0)
    assert r.kc == pytest.approx(5 + 45 / 2)
    assert schedule_reach(EX41, e0, 6.0, 2.0, 5.0) == select_reach_params(EX41, 6.0, 2.0, 5.0)


def test_report_indexing_and_text():
    reach = select_reach_params(EX41, 6.0, 2.0, 5.0)
    e = SwitchErrors(2.0, -5.0)
    rep = validate_conditions(determine_gains(e, reach, EX41), e, EX41)
    assert rep["kc > Ld"].slack == pytest.approx(1.0)
    assert "II-2" in str(rep)
    with pytest.raises(KeyError):
        rep["nope"]


def test_report_flags_bad_gain():
    e = SwitchErrors(2.0, -5.0)
    reach = ReachParams(2.0, 5.0, 6.0, 59.9)
    g = determine_gains(e, reach, EX41).replace(k2=10.0)
    rep = validate_conditions(g, e, EX41)
    assert not rep.ok
    assert "k2 > zone bound" in [c.name for c in rep.failed()]


def test_zero_logarithm_rho_is_clamped():
    em, rho = determine_rho(SwitchErrors(0.0, 0.0), 1.0, 10.0, GainConfig(Ld=0.0, k2M=20.0))
    assert (em, rho) == (0.0, 1.0)


def test_example42_terminal_steepness_follows_the_formula():
    # printed example value 12.19 disagrees; direct evaluation gives 20 ln(28.25/5.65)
    cfg = GainConfig(Ld=5.0, k2M=20.0, rho_c0=50.0, rho0=20.0)
    em, rho = determine_rho(SwitchErrors(2.0, -5.0), 1.26, 16.95, cfg)
    assert em == pytest.approx(5.0)
    assert rho == pytest.approx(32.19, abs=0.01)

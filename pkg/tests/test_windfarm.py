import numpy as np
import pytest

from windffs.experiments import COORD_STUDY_C, COORD_STUDY_OMEGA0, COORD_STUDY_WINDS
from windffs.windfarm import (MODE_FFS, TurbineParams, WindFarmState,
                              adaptive_gain, aero_power, aggregate_support,
                              build_mppt_curve, exit_check, kinetic_energy,
                              mppt_power, mppt_speed, operating_point,
                              shaft_step)

TP = TurbineParams()


def test_tracking_speeds_match_published_operating_points():
    for v, w in zip(COORD_STUDY_WINDS, COORD_STUDY_OMEGA0):
        assert mppt_speed(v, TP) == pytest.approx(w, rel=1e-9)   # anchor hits
        assert mppt_speed(v, TP) == pytest.approx(w, rel=0.02)   # stated band


def test_tracking_speed_clamps():
    assert mppt_speed(12.0, TP) == TP.omega_max
    assert mppt_speed(3.0, TP) == TP.omega_min
    with pytest.raises(ValueError):
        mppt_speed(0.0, TP)


def test_adaptive_gain_reproduces_published_values():
    for v, c_ref in zip(COORD_STUDY_WINDS, COORD_STUDY_C):
        state = WindFarmState(n_wt=80, v_w=v)
        assert adaptive_gain(state) == pytest.approx(c_ref, abs=0.005)


def test_adaptive_gain_limits_and_monotonicity():
    state = WindFarmState(n_wt=1, v_w=5.7964)   # map bottoms at omega_min
    assert adaptive_gain(state) == pytest.approx(0.0, abs=1e-6)
    cs = []
    for v in np.linspace(6.0, 10.6, 40):
        cs.append(adaptive_gain(WindFarmState(n_wt=1, v_w=v)))
    cs = np.asarray(cs)
    assert np.all(cs >= 0.0) and np.all(cs <= 1.0)
    inner = cs[(cs > 0) & (cs < 1)]
    assert np.all(np.diff(inner) > 0)   # strictly increasing between clamps


def test_kinetic_energy_bookkeeping():
    state = WindFarmState(n_wt=20, v_w=9.0)
    assert state.e_kmin < state.e_k0 <= state.e_kmax
    assert kinetic_energy(state, TP.omega_min) == pytest.approx(state.e_kmin)
    # oracle for the published anchor: (w0^2 - w_min^2)/(w_max^2 - w_min^2)
    st = WindFarmState(n_wt=1, v_w=8.5)
    w0 = st.omega0
    assert adaptive_gain(st) == pytest.approx(
        (w0 ** 2 - 0.7 ** 2) / (1.2 ** 2 - 0.7 ** 2), rel=1e-12)


def test_aero_power_zero_wind_and_clamped_cp():
    assert aero_power(0.0, 1.0, TP) == 0.0
    assert aero_power(2.0, 1.2, TP) >= 0.0   # extreme tip-speed ratio clamps at 0
    with pytest.raises(ValueError):
        aero_power(-1.0, 1.0, TP)
    with pytest.raises(ValueError):
        aero_power(9.0, 0.0, TP)


def test_rated_power_calibration():
    assert aero_power(TP.rated_v, TP.omega_max, TP) == pytest.approx(1.0, rel=1e-12)


def test_aero_power_unimodal_in_rotor_speed():
    omegas = np.linspace(0.3, 2.0, 4001)
    p = np.array([aero_power(9.0, w, TP) for w in omegas])
    i = int(np.argmax(p))
    assert 0 < i < len(p) - 1
    assert np.all(np.diff(p[: i + 1]) >= 0) and np.all(np.diff(p[i:]) <= 0)
    w_star = omegas[i]
    assert aero_power(9.0, 1.05 * w_star, TP) < aero_power(9.0, w_star, TP)


def test_curve_consistent_with_aero_surface():
    # tracking-curve power equals steady capture along the locus
    curve = build_mppt_curve(TP)
    for v in (6.5, 7.0, 8.5, 9.1, 9.5):
        op = operating_point(v, TP)
        w0 = op.omega0
        assert op.p0 == pytest.approx(aero_power(v, w0, TP), rel=5e-3)
        assert mppt_power(w0, TP, (op.curve_omega, op.curve_power)) == op.p0


def test_operating_point_is_exact_equilibrium():
    op = operating_point(9.0, TP)
    p_curve = mppt_power(op.omega0, TP, (op.curve_omega, op.curve_power))
    p_aero = aero_power(9.0, op.omega0, TP)
    assert p_curve == p_aero    # bitwise: inserted knot


def test_shaft_torque_balance_and_signs():
    state = WindFarmState(n_wt=1, v_w=9.0)
    p_eq = aero_power(9.0, state.omega_r, TP)
    w0 = state.omega_r
    for _ in range(1000):
        shaft_step(state, p_eq, 1e-3)
    assert state.omega_r == pytest.approx(w0, abs=1e-12)
    state2 = WindFarmState(n_wt=1, v_w=9.0)
    for _ in range(1000):
        shaft_step(state2, p_eq + 0.1, 1e-3)
    assert state2.omega_r < w0


def test_shaft_energy_audit_window():
    # released kinetic energy equals the electrical-minus-aero integral
    state = WindFarmState(n_wt=1, v_w=9.0)
    dt = 1e-3
    p_extra = 0.15
    m = TP.inertia_m
    e0 = 0.5 * m * state.omega_r ** 2
    imbalance = []
    for _ in range(4000):
        pa = aero_power(9.0, state.omega_r, TP)
        p_el = state.p_wt0 + p_extra
        imbalance.append(pa - p_el)
        shaft_step(state, p_el, dt)
    imbalance.append(aero_power(9.0, state.omega_r, TP) - (state.p_wt0 + p_extra))
    de = 0.5 * m * state.omega_r ** 2 - e0
    integral = np.trapezoid(imbalance, dx=dt)
    assert abs(integral - de) / abs(de) < 1e-3


def test_exit_check_boundaries():
    state = WindFarmState(n_wt=1, v_w=9.0)
    state.mode = MODE_FFS
    state.omega_r = state.omega0 - 0.05
    p_curve = state.mppt_power_at(state.omega_r)
    assert exit_check(state, p_curve + 0.05) == "stay_FFS"
    assert exit_check(state, p_curve) == "switch_to_MPPT"
    state.omega_r = state.omega0   # not below the pre-event speed: no exit
    assert exit_check(state, state.mppt_power_at(state.omega_r)) == "stay_FFS"
    state.mode = 0
    with pytest.raises(ValueError):
        exit_check(state, 0.5)


def test_aggregate_support():
    farms = [(WindFarmState(n_wt=20, v_w=9.0), None)]
    farms = [(s, s.p_wt0) for s, _ in farms]
    assert aggregate_support(farms, 200.0) == 0.0
    s = WindFarmState(n_wt=20, v_w=9.0)
    total = aggregate_support([(s, s.p_wt0 + 0.1)], 200.0)
    assert total == pytest.approx(0.1 * 20 * 5.0 / 200.0, rel=1e-12)
    with pytest.raises(ValueError):
        aggregate_support([(s, s.p_wt0)], 0.0)


def test_turbine_params_invariants():
    with pytest.raises(ValueError):
        TurbineParams(omega_min=1.2, omega_max=0.7)
    with pytest.raises(ValueError):
        TurbineParams(rated_mw=-5.0)
    with pytest.raises(ValueError):
        TurbineParams(mppt_v_anchors=(7.5, 6.5), mppt_omega_anchors=(0.9, 0.78))


def test_inertia_constant_from_physical_data():
    # 1993.285 kg*m^2 at 1484.153 rpm on a 5 MW base
    omega_b = TP.omega_nom_rpm * 2 * np.pi / 60.0
    assert TP.inertia_m == pytest.approx(TP.j_wt * omega_b ** 2 / 5e6, rel=1e-12)
    assert TP.inertia_m == pytest.approx(9.63, abs=0.01)


def test_nominal_cubic_and_slope_summaries():
    assert TP.k_v == pytest.approx(0.122, abs=0.002)
    # cubic fit reproduces curve power near the upper anchors within a few %
    k = TP.k_opt
    assert mppt_power(1.1, TP) == pytest.approx(k * 1.1 ** 3, rel=0.08)

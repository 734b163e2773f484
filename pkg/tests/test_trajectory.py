import numpy as np
import pytest

from windffs.params import SystemParams
from windffs.trajectory import (alpha_for_nadir, f_opt, make_spec,
                                reference_rocof, rocof_opt)

P_VA = SystemParams(inertia_h=4.0, damping_df=1.0, droop_inv_r=20.0, base_mva=200.0)


def test_make_spec_single_wf_numbers():
    spec = make_spec(P_VA, pd=14.2 / 200.0, alpha=1.18)
    assert spec.nadir_hz(50.0) == pytest.approx(-0.2, abs=1e-3)
    assert spec.t_f == pytest.approx(2 * 1.18 * 4.0 / 21.0, rel=1e-12)


def test_alpha_one_gives_steady_state_asymptote():
    spec = make_spec(P_VA, pd=0.075, alpha=1.0)
    assert spec.a_f * 50.0 == pytest.approx(P_VA.steady_state_deviation_hz(0.075),
                                            rel=1e-12)


def test_alpha_below_one_rejected_and_low_alpha_warns():
    with pytest.raises(ValueError):
        make_spec(P_VA, pd=0.075, alpha=0.99)
    with pytest.warns(UserWarning):
        make_spec(P_VA, pd=0.075, alpha=1.05)


def test_alpha_for_nadir_matches_published_choices():
    assert alpha_for_nadir(P_VA, 14.2 / 200.0, 0.2) == pytest.approx(1.18, abs=5e-3)
    p_vb = SystemParams(inertia_h=4.1289, damping_df=1.47, droop_inv_r=17.0,
                        base_mva=8300.0)
    assert alpha_for_nadir(p_vb, 500.0 / 8300.0, 0.2) == pytest.approx(1.226, abs=5e-3)


def test_endpoint_values():
    spec = make_spec(P_VA, pd=0.075, alpha=1.18)
    assert f_opt(spec, 0.0) == 0.0
    assert rocof_opt(spec, 0.0) == pytest.approx(-0.075 / (2 * 4.0), rel=1e-12)
    assert f_opt(spec, 1e6) == pytest.approx(spec.a_f, rel=1e-12)
    assert rocof_opt(spec, 1e3) == pytest.approx(0.0, abs=1e-15)
    assert f_opt(spec, spec.t_f) == pytest.approx(spec.a_f * (1 - np.exp(-1)), rel=1e-12)


def test_defining_identity_machine_precision():
    # 2H * rocof + (K_g/alpha) * f + P_d == 0 on a dense grid
    spec = make_spec(P_VA, pd=0.075, alpha=1.18)
    t = np.linspace(0.0, 20 * spec.t_f, 10_000)
    resid = (2 * P_VA.inertia_h * rocof_opt(spec, t)
             + (P_VA.kg / spec.alpha) * f_opt(spec, t) + spec.pd)
    assert np.max(np.abs(resid)) / spec.pd <= 1e-12


def test_monotone_and_bounded():
    spec = make_spec(P_VA, pd=0.075, alpha=1.5)
    t = np.linspace(0, 8 * spec.t_f, 5000)   # before float saturation at a_f
    f = f_opt(spec, t)
    assert np.all(np.diff(f) < 0)
    assert np.all(f > spec.a_f)


def test_reference_rocof_reproduces_time_form():
    spec = make_spec(P_VA, pd=0.075, alpha=1.18)
    t = np.linspace(0, 10 * spec.t_f, 2000)
    for ti in t[::50]:
        assert reference_rocof(spec, f_opt(spec, ti), P_VA) == pytest.approx(
            rocof_opt(spec, ti), rel=1e-12, abs=1e-18)


def test_time_independent_ode_reproduces_trajectory():
    # integrating d(df)/dt = -df/T_f - Pd/2H from zero recovers the curve
    spec = make_spec(P_VA, pd=0.075, alpha=1.18)
    dt = 1e-4
    n = int(10 * spec.t_f / dt)
    df = 0.0
    for k in range(n):
        # RK4 on the scalar linear ODE
        def rate(x):
            return -x / spec.t_f - spec.pd / (2 * P_VA.inertia_h)
        k1 = rate(df)
        k2 = rate(df + dt / 2 * k1)
        k3 = rate(df + dt / 2 * k2)
        k4 = rate(df + dt * k3)
        df += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    assert df == pytest.approx(f_opt(spec, n * dt), rel=1e-9)


def test_report_contains_key_numbers():
    spec = make_spec(P_VA, pd=0.071, alpha=1.18)
    rep = spec.report(50.0)
    assert "T_f" in rep and "alpha" in rep and "-0.19" in rep

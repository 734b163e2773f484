import numpy as np
import pytest

from windffs.controllers import (ESTIMATION_WINDOW_S, ModelBasedFfs, PiGains,
                                 PiState, SicController, TiPiController,
                                 VicController, estimate_power_deficit,
                                 pi_prototype_step, scale_gains)
from windffs.governors import SimplifiedGovernor
from windffs.params import SystemParams
from windffs.trajectory import f_opt, make_spec

P_VA = SystemParams(inertia_h=4.0, damping_df=1.0, droop_inv_r=20.0, base_mva=200.0)
GAINS = PiGains(kp=148.0, ki=13.5)


def test_pi_prototype_zero_error():
    st = PiState()
    for _ in range(100):
        assert pi_prototype_step(st, 0.0, GAINS, 1e-3) == 0.0


def test_pi_prototype_constant_error_closed_form():
    st = PiState()
    eps, tau, dt = 2e-3, 1.5, 1e-3
    out = 0.0
    for _ in range(int(tau / dt)):
        out = pi_prototype_step(st, eps, GAINS, dt)
    assert out == pytest.approx(GAINS.kp * eps + GAINS.ki * eps * tau, rel=1e-9)


def test_scale_gains():
    assert scale_gains(GAINS, 1.0) == GAINS
    half = scale_gains(GAINS, 0.5)
    assert half.kp == 74.0 and half.ki == 6.75
    zero = scale_gains(GAINS, 0.0)
    assert zero.kp < 1e-200 and zero.ki < 1e-200
    with pytest.raises(ValueError):
        scale_gains(GAINS, 1.5)


def test_ti_pi_inactive_outputs_zero():
    ctl = TiPiController(GAINS, 1.18, P_VA)
    assert ctl.step(-0.002, 1e-3) == 0.0


def test_ti_pi_perfect_tracking_fixed_point():
    # feeding the trajectory itself keeps the reference on the trajectory and
    # the error near zero (forward-Euler discretization error only)
    ctl = TiPiController(GAINS, 1.18, P_VA)
    pd_hat = 0.071
    spec = make_spec(P_VA, pd_hat, 1.18)
    dt = 1e-4
    ctl.activate(df_meas=0.0, pd_hat=pd_hat)
    worst = 0.0
    for k in range(int(10 * spec.t_f / dt)):
        df_act = f_opt(spec, k * dt)
        ctl.step(df_act, dt)
        worst = max(worst, abs(ctl.df_ref - f_opt(spec, (k + 1) * dt)))
    assert worst < 5e-4 * abs(spec.a_f)


def test_ti_pi_spec_reflects_estimate():
    ctl = TiPiController(GAINS, 1.18, P_VA)
    ctl.activate(df_meas=-0.002, pd_hat=0.071)
    spec = ctl.spec()
    assert spec.a_f == pytest.approx(-1.18 * 0.071 / 21.0, rel=1e-12)
    assert spec.t_f == pytest.approx(2 * 1.18 * 4 / 21.0, rel=1e-12)


def test_model_based_zero_input_and_gain():
    ctl = ModelBasedFfs(SimplifiedGovernor(tg=1.0, inv_r=20.0), P_VA, alpha=1.18)
    assert ctl.k_w == pytest.approx(21.0 / 1.18 - 1.0, rel=1e-12)
    for _ in range(50):
        assert ctl.step(0.0, 1e-3) == 0.0


def test_model_based_steady_output_recovers_kinetic_energy():
    # held at the trajectory asymptote the law commands net absorption
    ctl = ModelBasedFfs(SimplifiedGovernor(tg=1.0, inv_r=20.0), P_VA, alpha=1.18)
    a_f = -1.18 * 0.075 / 21.0
    out = 0.0
    for _ in range(20000):
        out = ctl.step(a_f, 1e-3)
    assert out == pytest.approx(0.075 + a_f * 21.0, rel=1e-3)   # = -(alpha-1)Pd


def test_vic_definitional():
    vic = VicController(k_df=9.63, k_pf=8.0, t_filt=0.1)
    assert vic.step(0.0, 1e-3) == 0.0
    # constant-RoCoF ramp: the filtered estimate converges to the slope
    vic2 = VicController(k_df=9.63, k_pf=8.0, t_filt=0.05)
    r, dt = -0.002, 1e-4
    out = 0.0
    for k in range(20000):
        out = vic2.step(r * (k * dt), dt)
    df_now = r * (20000 * dt - dt)
    assert out == pytest.approx(-9.63 * r - 8.0 * df_now, rel=5e-3)


def test_vic_adaptive_scaling():
    base = VicController(k_df=10.0, k_pf=8.0, c=1.0)
    scaled = VicController(k_df=10.0, k_pf=8.0, c=0.5)
    assert scaled.k_df == 0.5 * base.k_df and scaled.k_pf == 0.5 * base.k_pf


def test_sic_command_profile():
    sic = SicController(dp0=0.05, tau=10.0)
    assert sic.command(0.0) == 0.05
    assert sic.command(9.999) == 0.05
    assert sic.command(10.0) is None


def test_estimator_flat_frequency():
    t = np.linspace(0, 0.3, 301)
    assert estimate_power_deficit(t, np.zeros_like(t), P_VA) == 0.0


def test_estimator_pure_inertial_exact():
    pd = 0.075
    t = np.linspace(0, 0.3, 301)
    df = -pd / (2 * P_VA.inertia_h) * t
    assert estimate_power_deficit(t, df, P_VA) == pytest.approx(pd, rel=1e-12)
    assert estimate_power_deficit(t, df, P_VA) > 0.0


def test_estimator_rejects_bad_input():
    with pytest.raises(ValueError):
        estimate_power_deficit([0.0], [0.0], P_VA)
    with pytest.raises(ValueError):
        estimate_power_deficit([0.0, 0.1], [0.0, -1e-3], P_VA,
                               window=ESTIMATION_WINDOW_S)


def test_gains_positive_invariant():
    with pytest.raises(ValueError):
        PiGains(kp=0.0, ki=1.0)
    with pytest.raises(ValueError):
        PiGains(kp=1.0, ki=-1.0)

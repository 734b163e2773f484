from dataclasses import replace

import numpy as np
import pytest

from windffs.experiments import IEEEG1_SINGLE, IEEEG3_SINGLE, IEEEG1_FLEET
from windffs.governors import (Governor, IeeeG1Params, IeeeG3Params,
                               SimplifiedGovernor, gov_freq_response, gov_step,
                               perturb_params)


def step_response(params, df, t_end, dt=1e-3):
    gov = Governor(params)
    out = []
    for _ in range(int(round(t_end / dt))):
        out.append(gov.step(df, dt))
    return np.asarray(out)


def test_zero_input_zero_output():
    for params in (SimplifiedGovernor(tg=1.0, inv_r=20.0), IEEEG1_SINGLE, IEEEG3_SINGLE):
        gov = Governor(params)
        for _ in range(100):
            assert gov.step(0.0, 1e-3) == 0.0


def test_simplified_first_order_step_response():
    tg, inv_r, df0 = 1.0, 20.0, -0.004
    out = step_response(SimplifiedGovernor(tg=tg, inv_r=inv_r), df0, 8.0)
    t = np.arange(1, len(out) + 1) * 1e-3
    expected = inv_r * (-df0) * (1.0 - np.exp(-t / tg))
    assert np.max(np.abs(out - expected)) < 1e-9
    k_tg = int(tg / 1e-3) - 1
    assert out[k_tg] == pytest.approx(inv_r * (-df0) * (1 - np.exp(-1)), rel=1e-6)


def test_simplified_static_droop():
    gov = Governor(SimplifiedGovernor(tg=0.0, inv_r=20.0))
    assert gov.step(-0.002, 1e-3) == pytest.approx(0.04, rel=1e-12)


def test_ieeeg1_dc_gain_single_shaft():
    # final value of the block diagram equals the droop times the tap sum
    g1 = next(IeeeG1Params(inv_r=17.0, k1=k1, k3=k3, k5=k5, k7=k7,
                           t1=t1, t3=t3, t4=t4, t5=t5, t6=t6, t7=t7)
              for (_, _, k1, k3, k5, k7, t1, t3, t4, t5, t6, t7) in IEEEG1_FLEET[:1])
    assert g1.k1 + g1.k3 + g1.k5 + g1.k7 == pytest.approx(1.0)
    df0 = -1e-4   # small step, limiters inactive
    out = step_response(g1, df0, 120.0, dt=2e-3)
    assert out[-1] == pytest.approx(-df0 * 17.0, rel=1e-4)
    # independent oracle: symbolic DC reduction
    assert g1.freq_response(0.0).real == pytest.approx(-17.0, rel=1e-12)
    assert g1.freq_response(0.0).imag == 0.0


def test_ieeeg3_dc_gain():
    out = step_response(IEEEG3_SINGLE, -1e-4, 200.0, dt=2e-3)
    assert out[-1] == pytest.approx(20.0 * 1e-4, rel=1e-3)
    assert IEEEG3_SINGLE.freq_response(0.0).real == pytest.approx(-20.0, rel=1e-12)


def test_ieeeg3_nonminimum_phase_dip():
    # hydro water column: power initially moves against the final direction
    out = step_response(IEEEG3_SINGLE, -1e-4, 5.0, dt=1e-3)
    assert out[:50].min() < 0.0 < out[-1]


def test_simplified_freq_response_magnitude():
    gov = SimplifiedGovernor(tg=20.0, inv_r=20.0)
    mag = abs(gov_freq_response(gov, 0.15))
    assert mag == pytest.approx(20.0 / np.sqrt(10.0), rel=1e-12)
    assert gov_freq_response(gov, 0.0) == pytest.approx(-20.0)


def test_freq_response_rejects_bad_omega():
    with pytest.raises(ValueError):
        gov_freq_response(SimplifiedGovernor(tg=1.0, inv_r=20.0), -1.0)


@pytest.mark.parametrize("params,omega", [
    (SimplifiedGovernor(tg=1.0, inv_r=20.0), 0.5),
    (replace(IEEEG1_SINGLE, p_min=-5.0, p_max=5.0), 0.3),   # limiters inactive
    (IEEEG3_SINGLE, 0.4),
])
def test_small_signal_time_frequency_consistency(params, omega):
    # sinusoidal drive: steady response amplitude/phase match the transfer
    # function within 1% once transients decay
    gov = Governor(params)
    dt = 1e-3
    amp = 1e-5
    t_settle = 60.0
    n_set = int(t_settle / dt)
    periods = 6
    n_meas = int(round(periods * 2 * np.pi / omega / dt))
    acc = 0.0 + 0.0j
    for k in range(n_set + n_meas):
        t = k * dt
        out = gov.step(amp * np.sin(omega * t), dt)
        if k >= n_set:
            acc += out * np.exp(-1j * omega * t)
    measured = 2.0 * acc * dt / (n_meas * dt)
    expected = gov_freq_response(params, omega) * amp * (-1j)  # sin drive
    assert abs(measured - expected) / abs(expected) < 0.01


def test_ieeeg1_limiters_respected():
    gov = Governor(IEEEG1_SINGLE)
    dt = 1e-3
    prev_valve = 0.0
    for k in range(20000):
        df = -0.05 if k < 10000 else 0.05   # large swings
        gov.step(df, dt)
        valve = gov.state[1]
        assert IEEEG1_SINGLE.p_min - 1e-9 <= valve <= IEEEG1_SINGLE.p_max + 1e-9
        rate = (valve - prev_valve) / dt
        assert IEEEG1_SINGLE.u_c - 1e-6 <= rate <= IEEEG1_SINGLE.u_o + 1e-6
        prev_valve = valve


def test_perturb_zero_level_identity():
    assert perturb_params(IEEEG1_SINGLE, 0.0, 7) is IEEEG1_SINGLE


def test_perturb_deterministic_and_bounded():
    a = perturb_params(IEEEG1_SINGLE, 0.1, 42)
    b = perturb_params(IEEEG1_SINGLE, 0.1, 42)
    assert a == b
    c = perturb_params(IEEEG1_SINGLE, 0.1, 43)
    assert c != a
    for name in ("t1", "t3", "t4", "t5", "t6", "t7", "inv_r", "k1"):
        ratio = getattr(a, name) / getattr(IEEEG1_SINGLE, name)
        assert 0.9 <= ratio <= 1.1


def test_perturb_spread_statistics():
    # 1000 draws at 10%: parameter factors fill the band roughly uniformly
    ratios = np.array([perturb_params(IEEEG1_SINGLE, 0.1, s).t5 / IEEEG1_SINGLE.t5
                       for s in range(1000)])
    assert ratios.min() >= 0.9 and ratios.max() <= 1.1
    assert abs(ratios.mean() - 1.0) < 0.01
    assert np.std(ratios) == pytest.approx(0.2 / np.sqrt(12), rel=0.15)


def test_perturb_respects_droop_flag():
    a = perturb_params(IEEEG1_SINGLE, 0.1, 5, include_droop=False)
    assert a.inv_r == IEEEG1_SINGLE.inv_r
    assert a.t5 != IEEEG1_SINGLE.t5


def test_invalid_parameter_sets_rejected():
    with pytest.raises(ValueError):
        IeeeG1Params(inv_r=20.0, k1=0.3, k3=0.15, k5=0.3, k7=0.25,
                     t1=0.2, t3=0.1, t4=0.25, t5=3.0, t6=3.5, t7=0.25,
                     u_o=-0.1, u_c=-0.3)
    with pytest.raises(ValueError):
        IeeeG3Params(inv_rp=20.0, r_r=0.2, t_g=0.0, t_p=0.04, t_r=3.0, t_w=0.75)
    with pytest.raises(ValueError):
        SimplifiedGovernor(tg=-1.0, inv_r=20.0)


def test_gov_step_function_alias():
    gov = Governor(SimplifiedGovernor(tg=1.0, inv_r=20.0))
    assert gov_step(gov, -0.001, 1e-3) == pytest.approx(gov.output(-0.001))

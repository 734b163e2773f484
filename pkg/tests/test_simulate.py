import numpy as np
import pytest

from windffs._kernel import available_backends
from windffs.experiments import multi_wf_config, single_wf_config
from windffs.scenario import load_config
from windffs.simulate import run_scenario


def short_single(t_end=6.0, **kw):
    cfg = single_wf_config(**kw)
    cfg.sim.t_end_s = t_end
    return cfg


def test_no_disturbance_columns_identically_zero():
    cfg = short_single(3.0)
    cfg.disturbance = None
    res = run_scenario(cfg)
    assert np.all(res.df_pu == 0.0)
    assert np.all(res.rocof_pu == 0.0)
    assert np.all(res.dpm_pu == 0.0)
    assert np.all(res.dpwf_pu == 0.0)
    assert np.all(res.omega[:, 0] == res.omega[0, 0])
    assert np.all(res.mode == 0)


def test_repeat_runs_bit_identical_csv(tmp_path):
    cfg = short_single(4.0)
    run_scenario(cfg).to_csv(tmp_path / "a.csv")
    run_scenario(cfg).to_csv(tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_support_cannot_move_steady_state():
    with_ffs = run_scenario(single_wf_config())
    cfg = single_wf_config(controller="none")
    no_ffs = run_scenario(cfg)
    assert with_ffs.final_df_hz == pytest.approx(no_ffs.final_df_hz, abs=1e-6)
    ss = cfg.system.steady_state_deviation_hz(cfg.disturbance.magnitude_pd)
    assert with_ffs.final_df_hz == pytest.approx(ss, abs=1e-3)


def test_integrator_fourth_order_convergence():
    # no-limiter linear path: simplified governor, support disabled
    def run(dt):
        cfg = short_single(4.0, controller="none")
        cfg.sim.dt_s = dt
        cfg.disturbance = type(cfg.disturbance)(
            kind="load_surge", magnitude_pd=cfg.disturbance.magnitude_pd, time=1.0)
        return run_scenario(cfg).df_pu

    d4, d2, d1 = run(4e-3), run(2e-3), run(1e-3)
    err_coarse = np.max(np.abs(d4[::1] - d2[::2][: len(d4)]))
    err_fine = np.max(np.abs(d2[::1] - d1[::2][: len(d2)]))
    order = np.log2(err_coarse / err_fine)
    assert order > 3.8


def test_backends_agree_exactly():
    if "compiled" not in available_backends():
        pytest.skip("compiled kernel not built")
    cfg = short_single(5.0)
    a = run_scenario(cfg, backend="compiled")
    b = run_scenario(cfg, backend="python")
    assert np.array_equal(a.df_pu, b.df_pu)
    assert np.array_equal(a.omega, b.omega)
    assert np.array_equal(a.p, b.p)
    assert np.array_equal(a.mode, b.mode)
    assert a.events == b.events


def test_multi_backend_agreement_multifarm():
    if "compiled" not in available_backends():
        pytest.skip("compiled kernel not built")
    cfg = multi_wf_config()
    cfg.sim.t_end_s = 4.0
    a = run_scenario(cfg, backend="compiled")
    b = run_scenario(cfg, backend="python")
    assert np.array_equal(a.df_pu, b.df_pu)
    assert np.array_equal(a.p, b.p)


def test_nonfinite_state_aborts_with_step():
    # a step far beyond the governor's explicit-integration stability limit
    cfg = short_single(1000.0)
    cfg.sim.dt_s = 10.0
    with pytest.raises(RuntimeError, match="step"):
        run_scenario(cfg)


def test_stall_event_recorded_and_run_continues():
    cfg = short_single(20.0, controller="vic_fixed")
    for fb in cfg.windfarms:
        fb.v_w = 6.5           # little stored energy
        fb.vic_k_pf = 400.0    # and a sustained drain
    res = run_scenario(cfg)
    stalls = res.farm_events("stall_protection")
    assert len(stalls) == 1
    k = stalls[0]["step"]
    assert res.omega[k, 0] <= cfg.windfarms[0].turbine.omega_min + 1e-9
    assert len(res.df_pu) == int(20.0 / cfg.sim.dt_s) + 1   # ran to the end
    assert res.omega[-1, 0] > res.omega[k, 0]               # recovering


def test_csv_layout(tmp_path):
    cfg = multi_wf_config()
    cfg.sim.t_end_s = 0.01
    cfg.disturbance = None
    res = run_scenario(cfg)
    res.to_csv(tmp_path / "out.csv")
    lines = (tmp_path / "out.csv").read_text().splitlines()
    head = lines[0].split(",")
    assert head[:5] == ["t_s", "df_hz", "rocof_hzps", "dpm_pu", "dpwf_pu"]
    assert head[5:8] == ["wf1_omega_pu", "wf1_p_pu", "wf1_mode"]
    assert head[-3:] == ["wf5_omega_pu", "wf5_p_pu", "wf5_mode"]
    assert len(lines) == 1 + int(0.01 / cfg.sim.dt_s) + 1


def test_estimation_window_snaps_to_steps():
    cfg = short_single(4.0)
    res = run_scenario(cfg)
    act = res.farm_events("support_activated")[0]
    assert act["t_s"] == pytest.approx(2.0 + 0.3, abs=1e-9)


def test_generator_trip_removes_governor_response():
    cfg = multi_wf_config(controller="none", disturbance="generator_trip")
    cfg.sim.t_end_s = 100.0
    res = run_scenario(cfg)
    # settling reflects the reduced droop: 17 - 17*600/8300
    droop = 17.0 - 17.0 * 600.0 / 8300.0
    expected = -cfg.disturbance.magnitude_pd / (droop + 1.47) * 50.0
    assert res.final_df_hz == pytest.approx(expected, abs=2e-3)


def test_energy_audit_every_scenario(single_wf_result, multi_wf_surge_result):
    for res in (single_wf_result, multi_wf_surge_result):
        for audit in res.energy_audit():
            assert audit["rel_mismatch"] < 1e-3


def test_step_swing_equilibrium_and_initial_rocof():
    from windffs.params import SystemParams
    from windffs.simulate import step_swing

    p = SystemParams(inertia_h=4.0, damping_df=1.0, droop_inv_r=20.0)
    df, rocof = step_swing(0.0, 0.3, 0.3, p, 1e-3)
    assert df == 0.0 and rocof == 0.0
    _, rocof = step_swing(0.0, 0.0, 0.075, p, 1e-3)
    assert rocof == pytest.approx(-0.075 / (2 * 4.0), rel=1e-12)
    with pytest.raises(ValueError):
        step_swing(float("nan"), 0.0, 0.0, p, 1e-3)
    with pytest.raises(ValueError):
        step_swing(0.0, 0.0, 0.0, p, 0.0)


def test_step_swing_matches_first_order_closed_form():
    # no governor: 2H d(df)/dt = -Pd - Df*df has an explicit solution
    from windffs.params import SystemParams
    from windffs.simulate import step_swing

    h, d_f, pd, dt = 4.0, 1.0, 0.075, 1e-3
    p = SystemParams(inertia_h=h, damping_df=d_f, droop_inv_r=20.0)
    df = 0.0
    for _ in range(1000):
        df, _ = step_swing(df, 0.0, pd, p, dt)
    expected = -(pd / d_f) * (1.0 - np.exp(-d_f * 1.0 / (2 * h)))
    assert df == pytest.approx(expected, rel=1e-10)


def test_model_based_exact_model_reaches_trajectory_nadir():
    cfg = single_wf_config(governor="ieeeg1", controller="model_based")
    cfg.sim.t_end_s = 40.0
    res = run_scenario(cfg)
    nadir_ref = -1.18 * 0.075 / 21.0 * 50.0   # true-deficit trajectory asymptote
    assert abs(res.nadir_hz - nadir_ref) / abs(nadir_ref) < 0.06

import math

import pytest

from windffs.params import Disturbance, SystemParams, steady_state_deviation


def test_kg_is_exact_sum():
    p = SystemParams(inertia_h=4.0, damping_df=1.0, droop_inv_r=20.0, base_mva=200.0)
    assert p.kg == 1.0 + 20.0


def test_steady_state_single_wf_case():
    # 14.2 MW estimated deficit on the 200 MVA system settles at -0.169 Hz
    p = SystemParams(inertia_h=4.0, damping_df=1.0, droop_inv_r=20.0, base_mva=200.0)
    assert steady_state_deviation(p, 14.2 / 200.0) == pytest.approx(-0.169, abs=5e-4)


def test_steady_state_multi_wf_case():
    # 500 MW on the 8300 MVA aggregate settles at -0.163 Hz
    p = SystemParams(inertia_h=4.1289, damping_df=1.47, droop_inv_r=17.0,
                     base_mva=8300.0)
    assert steady_state_deviation(p, 500.0 / 8300.0) == pytest.approx(-0.163, abs=5e-4)


def test_steady_state_zero_deficit():
    p = SystemParams(inertia_h=4.0, damping_df=1.0, droop_inv_r=20.0)
    assert steady_state_deviation(p, 0.0) == 0.0


def test_steady_state_rejects_nonfinite():
    p = SystemParams(inertia_h=4.0, damping_df=1.0, droop_inv_r=20.0)
    with pytest.raises(ValueError):
        steady_state_deviation(p, math.nan)
    with pytest.raises(ValueError):
        steady_state_deviation(p, -0.1)


@pytest.mark.parametrize("field,value", [
    ("inertia_h", 0.0), ("inertia_h", -1.0), ("droop_inv_r", 0.0),
    ("damping_df", -0.1), ("base_mva", 0.0),
])
def test_system_params_invariants(field, value):
    kwargs = dict(inertia_h=4.0, damping_df=1.0, droop_inv_r=20.0, base_mva=200.0)
    kwargs[field] = value
    with pytest.raises(ValueError):
        SystemParams(**kwargs)


def test_disturbance_invariants():
    with pytest.raises(ValueError):
        Disturbance(kind="load_surge", magnitude_pd=0.0)
    with pytest.raises(ValueError):
        Disturbance(kind="load_surge", magnitude_pd=0.1, time=-1.0)
    with pytest.raises(ValueError):
        Disturbance(kind="weird", magnitude_pd=0.1)
    with pytest.raises(ValueError):
        Disturbance(kind="generator_trip", magnitude_pd=0.1)   # needs index
    d = Disturbance(kind="generator_trip", magnitude_pd=0.1, trip_governor=2)
    assert d.trip_governor == 2

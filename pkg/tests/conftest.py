import numpy as np
import pytest

from windffs.experiments import multi_wf_config, single_wf_config, COORD_STUDY_WINDS
from windffs.simulate import run_scenario


@pytest.fixture(scope="session")
def single_wf_result():
    """The reference single-farm run (simplified governor, proposed control)."""
    return run_scenario(single_wf_config())


@pytest.fixture(scope="session")
def multi_wf_surge_result():
    return run_scenario(multi_wf_config())


@pytest.fixture(scope="session")
def multi_wf_trip_result():
    return run_scenario(multi_wf_config(disturbance="generator_trip"))


@pytest.fixture(scope="session")
def coord_adaptive_result():
    cfg = multi_wf_config(gain_mode="adaptive", winds=COORD_STUDY_WINDS)
    cfg.sim.t_end_s = 80.0
    return run_scenario(cfg)


@pytest.fixture(scope="session")
def coord_fixed_result():
    cfg = multi_wf_config(gain_mode="fixed", winds=COORD_STUDY_WINDS)
    cfg.sim.t_end_s = 80.0
    return run_scenario(cfg)

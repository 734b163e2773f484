"""windffs: fast frequency support of wind farms.

Deterministic swing-equation simulator with governor/turbine models,
kinetic-energy-based wind-farm support controllers, a PI tuning toolkit and
Monte-Carlo verification campaigns.  The stepping kernel is compiled
(Cython) when available, with a pure-Python fallback selected at import.
"""

__version__ = "0.1.0"

from .params import Disturbance, SystemParams, steady_state_deviation
from .trajectory import TrajectorySpec, f_opt, make_spec, reference_rocof, rocof_opt
from .controllers import PiGains, scale_gains
from .tuner import TunerConstants, design_pi, run_campaign, spectrum_upper_bound
from .scenario import ScenarioConfig, load_config, save_config
from .simulate import SimResult, run_scenario
from ._kernel import available_backends

__all__ = [
    "Disturbance", "SystemParams", "steady_state_deviation",
    "TrajectorySpec", "f_opt", "make_spec", "reference_rocof", "rocof_opt",
    "PiGains", "scale_gains",
    "TunerConstants", "design_pi", "run_campaign", "spectrum_upper_bound",
    "ScenarioConfig", "load_config", "save_config",
    "SimResult", "run_scenario",
    "available_backends", "__version__",
]

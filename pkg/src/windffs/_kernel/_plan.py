"""Flat array layout handed to the stepping kernels.

Both kernels (pure Python and the compiled extension) consume exactly this
structure, so a scenario produces the same trajectory regardless of backend.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# governor model codes (mirrored in governors.py)
GOV_SIMPLIFIED = 0
GOV_IEEEG1 = 1
GOV_IEEEG3 = 2

# farm controller codes
CTRL_NONE = 0
CTRL_TI_PI = 1
CTRL_PI_PROTO = 2
CTRL_MODEL_BASED = 3
CTRL_VIC_FIXED = 4
CTRL_VIC_ADAPTIVE = 5
CTRL_SIC = 6

# farm mode flags (CSV encoding)
MODE_MPPT = 0
MODE_FFS = 1
MODE_EXIT = 2

# event codes
EV_ACTIVATE = 1
EV_EXIT_MPPT = 2
EV_STALL = 3
EV_SIC_WITHDRAW = 4

N_GOV_PAR = 16
N_GOV_STATES = 6
N_CTRL_PAR = 6
N_CTRL_STATES = 4

# status codes returned by the kernels
STATUS_OK = 0
STATUS_NAN = 1


@dataclass
class KernelPlan:
    """Scenario compiled to plain arrays.

    Controller parameter slots (``ctrl_par[farm, :]``), per controller type:

    ti_pi        [kp_wt, ki_wt, t_f, h2_cfg, pd2h(set at activation), 0]
    pi_proto     [kp_wt, ki_wt, t_f, a_f, 0, 0]
    model_based  [k_w, inv_br, 0, 0, 0, 0]          (output on system base)
    vic_*        [k_df_wt, k_pf_wt, t_filt, 0, 0, 0]
    sic          [dp0_wt, tau_steps, 0, 0, 0, 0]

    ``*_wt`` gains are pre-scaled to the turbine power base (system-base PI
    gains divided by the farm base ratio; adaptive factors pre-multiplied).
    """

    n_steps: int
    dt: float
    h2: float                 # 2*H, system
    d_f: float
    dist_step: int
    pd: float                 # deficit, p.u. system base

    gov_type: np.ndarray      # (n_gov,) int64
    gov_par: np.ndarray       # (n_gov, N_GOV_PAR) float64
    gov_scale: np.ndarray     # (n_gov,) float64, S_machine/S_base
    gov_off_step: np.ndarray  # (n_gov,) int64, -1 = never trips

    ctrl_type: np.ndarray     # (n_farm,) int64
    ctrl_par: np.ndarray      # (n_farm, N_CTRL_PAR) float64
    ctrl_act_step: np.ndarray  # (n_farm,) int64
    br: np.ndarray            # (n_farm,) float64 farm base ratio
    m_wt: np.ndarray          # (n_farm,) float64 per-unit shaft inertia
    v_w: np.ndarray           # (n_farm,) float64
    omega0: np.ndarray        # (n_farm,) float64
    p0: np.ndarray            # (n_farm,) float64
    omega_min: np.ndarray     # (n_farm,) float64
    omega_max: np.ndarray     # (n_farm,) float64
    aero_scale: np.ndarray    # (n_farm,) float64
    lam_scale: np.ndarray     # (n_farm,) float64
    cp: np.ndarray            # (n_farm, 7) float64: c1..c6, lam_offset
    curve_off: np.ndarray     # (n_farm+1,) int64 knot offsets
    curve_w: np.ndarray       # (total_knots,) float64
    curve_p: np.ndarray       # (total_knots,) float64
    mir_type: np.ndarray      # (n_farm,) int64, -1 = no mirror governor
    mir_par: np.ndarray       # (n_farm, N_GOV_PAR) float64

    @property
    def n_gov(self) -> int:
        return len(self.gov_type)

    @property
    def n_farm(self) -> int:
        return len(self.ctrl_type)


@dataclass
class KernelOutput:
    """Preallocated result arrays; row k is the state at t = k*dt."""

    df: np.ndarray            # (n_steps+1,) p.u.
    rocof: np.ndarray         # (n_steps+1,) p.u./s
    dpm: np.ndarray           # (n_steps+1,) p.u. system base
    dpwf: np.ndarray          # (n_steps+1,) p.u. system base
    omega: np.ndarray         # (n_steps+1, n_farm)
    p: np.ndarray             # (n_steps+1, n_farm) turbine base
    mode: np.ndarray          # (n_steps+1, n_farm) int8
    est_pd: np.ndarray        # (n_farm,) deficit estimate, p.u. system base
    events: np.ndarray        # (max_events, 3) int64: step, farm, code
    n_events: int = 0
    status: int = STATUS_OK
    err_step: int = -1

    @classmethod
    def allocate(cls, n_steps: int, n_farm: int) -> "KernelOutput":
        n = n_steps + 1
        return cls(
            df=np.zeros(n), rocof=np.zeros(n), dpm=np.zeros(n), dpwf=np.zeros(n),
            omega=np.zeros((n, n_farm)), p=np.zeros((n, n_farm)),
            mode=np.zeros((n, n_farm), dtype=np.int8),
            est_pd=np.zeros(n_farm),
            events=np.zeros((4 * max(n_farm, 1) + 8, 3), dtype=np.int64),
        )

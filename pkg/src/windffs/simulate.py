"""Scenario assembly and execution.

Translates a validated ``ScenarioConfig`` into the flat kernel plan, runs
the selected stepping kernel and wraps the trajectories in ``SimResult``
(CSV serialization, energy audit, summary accessors).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._kernel import KernelOutput, KernelPlan, get_backend
from ._kernel import _plan as _pc
from .governors import GovernorParams, N_GOV_PAR
from .params import SystemParams
from .scenario import ScenarioConfig
from .trajectory import TrajectorySpec
from .windfarm import TurbineParams, adaptive_gain, aero_power, operating_point, WindFarmState

__all__ = ["SimResult", "run_scenario", "build_plan", "step_swing",
           "CSV_FLOAT_FMT"]


def step_swing(df: float, p_m: float, p_e: float, params: SystemParams,
               dt: float) -> tuple[float, float]:
    """One RK4 step of the aggregated swing equation with the powers held.

    2H d(df)/dt = p_m - p_e - D_f * df, per-unit.  Returns the advanced
    deviation and the rate of change evaluated at the step start.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if not (math.isfinite(df) and math.isfinite(p_m) and math.isfinite(p_e)):
        raise ValueError(f"non-finite swing input (df={df}, p_m={p_m}, p_e={p_e})")
    h2 = 2.0 * params.inertia_h

    def rate(x):
        return (p_m - p_e - params.damping_df * x) / h2

    k1 = rate(df)
    k2 = rate(df + 0.5 * dt * k1)
    k3 = rate(df + 0.5 * dt * k2)
    k4 = rate(df + dt * k3)
    return df + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), k1

CSV_FLOAT_FMT = "%.17g"

_CTRL_CODE = {
    "none": _pc.CTRL_NONE,
    "proposed_ti_pi": _pc.CTRL_TI_PI,
    "pi_prototype": _pc.CTRL_PI_PROTO,
    "model_based": _pc.CTRL_MODEL_BASED,
    "vic_fixed": _pc.CTRL_VIC_FIXED,
    "vic_adaptive": _pc.CTRL_VIC_ADAPTIVE,
    "sic": _pc.CTRL_SIC,
}

_EV_NAMES = {
    _pc.EV_ACTIVATE: "support_activated",
    _pc.EV_EXIT_MPPT: "exit_to_mppt",
    _pc.EV_STALL: "stall_protection",
    _pc.EV_SIC_WITHDRAW: "sic_withdrawal",
}


@dataclass
class SimResult:
    """Fixed-step scenario trajectories; row k is the state at t = k*dt."""

    dt: float
    f_nom: float
    df_pu: np.ndarray
    rocof_pu: np.ndarray
    dpm_pu: np.ndarray
    dpwf_pu: np.ndarray
    omega: np.ndarray           # (n, n_farm)
    p: np.ndarray               # (n, n_farm), turbine base
    mode: np.ndarray            # (n, n_farm), int8
    events: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self.df_pu)) * self.dt

    @property
    def df_hz(self) -> np.ndarray:
        return self.df_pu * self.f_nom

    @property
    def rocof_hzps(self) -> np.ndarray:
        return self.rocof_pu * self.f_nom

    @property
    def n_farm(self) -> int:
        return self.omega.shape[1]

    @property
    def nadir_hz(self) -> float:
        return float(self.df_hz.min())

    @property
    def final_df_hz(self) -> float:
        return float(self.df_hz[-1])

    def farm_events(self, code_name: str, farm: int | None = None) -> list:
        return [e for e in self.events
                if e["event"] == code_name and (farm is None or e["farm"] == farm)]

    def to_csv(self, path) -> None:
        cols = ["t_s", "df_hz", "rocof_hzps", "dpm_pu", "dpwf_pu"]
        for i in range(self.n_farm):
            cols += [f"wf{i + 1}_omega_pu", f"wf{i + 1}_p_pu", f"wf{i + 1}_mode"]
        with open(path, "w", newline="") as fh:
            fh.write(",".join(cols) + "\r\n")
            t = self.t
            df = self.df_hz
            ro = self.rocof_hzps
            for k in range(len(t)):
                row = [CSV_FLOAT_FMT % t[k], CSV_FLOAT_FMT % df[k],
                       CSV_FLOAT_FMT % ro[k], CSV_FLOAT_FMT % self.dpm_pu[k],
                       CSV_FLOAT_FMT % self.dpwf_pu[k]]
                for i in range(self.n_farm):
                    row += [CSV_FLOAT_FMT % self.omega[k, i],
                            CSV_FLOAT_FMT % self.p[k, i],
                            str(int(self.mode[k, i]))]
                fh.write(",".join(row) + "\r\n")

    def energy_audit(self) -> list[dict]:
        """Per-farm kinetic-energy balance check.

        Compares the integral of (aerodynamic - electrical) power against the
        change in stored kinetic energy; ``rel_mismatch`` is relative to the
        total exchanged energy.
        """
        out = []
        farms = self.meta.get("farms", [])
        for i in range(self.n_farm):
            fm = farms[i]
            params: TurbineParams = fm["turbine"]
            v_w = fm["v_w"]
            pa = np.array([aero_power(v_w, w, params) for w in self.omega[:, i]])
            imbalance = pa - self.p[:, i]
            integral = float(np.trapezoid(imbalance, dx=self.dt))
            throughput = float(np.trapezoid(np.abs(imbalance), dx=self.dt))
            m = params.inertia_m
            d_ek = 0.5 * m * (self.omega[-1, i] ** 2 - self.omega[0, i] ** 2)
            mismatch = abs(integral - d_ek)
            out.append({
                "farm": i,
                "delta_ek": d_ek,
                "power_integral": integral,
                "throughput": throughput,
                "rel_mismatch": mismatch / max(throughput, 1e-12),
            })
        return out


def _ke_fraction(farm_block, op) -> float:
    state = WindFarmState(n_wt=farm_block.n_wt, v_w=farm_block.v_w,
                          params=farm_block.turbine, _op=op)
    return adaptive_gain(state)


def build_plan(cfg: ScenarioConfig,
               mirror_params: dict[int, GovernorParams] | None = None
               ) -> tuple[KernelPlan, dict]:
    """Compile a validated config into the kernel plan.

    ``mirror_params`` overrides the governor model assumed by model-based
    farm controllers (farm index -> parameter set), used for the
    modeling-error experiments.
    """
    cfg.validate()
    sysp = cfg.system
    dt = cfg.sim.dt_s
    n_steps = int(round(cfg.sim.t_end_s / dt))
    mirror_params = mirror_params or {}

    if cfg.disturbance is not None:
        dist_step = int(round(cfg.disturbance.time / dt))
        pd = cfg.disturbance.magnitude_pd
    else:
        dist_step = n_steps + 1
        pd = 0.0

    # trajectory ratio and PI gains (system base)
    if cfg.alpha is not None:
        alpha = cfg.alpha
    else:
        from .trajectory import alpha_for_nadir
        alpha = alpha_for_nadir(sysp, max(pd, 1e-9), cfg.target_nadir_hz)
    if cfg.gains is not None:
        kp0, ki0 = cfg.gains
    else:
        from .tuner import TunerConstants, design_pi
        g = design_pi(sysp, alpha, TunerConstants())
        kp0, ki0 = g.kp, g.ki

    n_gov = len(cfg.governors)
    gov_type = np.zeros(n_gov, dtype=np.int64)
    gov_par = np.zeros((n_gov, N_GOV_PAR))
    gov_scale = np.zeros(n_gov)
    gov_off = np.full(n_gov, -1, dtype=np.int64)
    for i, g in enumerate(cfg.governors):
        gov_type[i] = g.params.kernel_type
        gov_par[i] = g.params.kernel_params()
        gov_scale[i] = g.s_mva / sysp.base_mva
    if cfg.disturbance is not None and cfg.disturbance.kind == "generator_trip":
        gov_off[cfg.disturbance.trip_governor] = dist_step

    n_farm = len(cfg.windfarms)
    ctrl_type = np.zeros(n_farm, dtype=np.int64)
    ctrl_par = np.zeros((n_farm, _pc.N_CTRL_PAR))
    ctrl_act = np.full(n_farm, n_steps + 1, dtype=np.int64)
    br = np.zeros(n_farm)
    m_wt = np.zeros(n_farm)
    v_w = np.zeros(n_farm)
    omega0 = np.zeros(n_farm)
    p0 = np.zeros(n_farm)
    omega_min = np.zeros(n_farm)
    omega_max = np.zeros(n_farm)
    aero_scale = np.zeros(n_farm)
    lam_scale = np.zeros(n_farm)
    cp = np.zeros((n_farm, 7))
    mir_type = np.full(n_farm, -1, dtype=np.int64)
    mir_par = np.zeros((n_farm, N_GOV_PAR))
    curve_w_parts = []
    curve_p_parts = []
    curve_off = np.zeros(n_farm + 1, dtype=np.int64)

    est_window_steps = max(1, int(round(cfg.estimation_window_s / dt)))
    farm_meta = []
    for i, f in enumerate(cfg.windfarms):
        tp = f.turbine
        op = operating_point(f.v_w, tp)
        c_ke = _ke_fraction(f, op)
        c = c_ke if f.gain_mode == "adaptive" else 1.0
        ctrl_type[i] = _CTRL_CODE[f.controller]
        br[i] = f.n_wt * tp.rated_mw / sysp.base_mva
        m_wt[i] = tp.inertia_m
        v_w[i] = f.v_w
        omega0[i] = op.omega0
        p0[i] = op.p0
        omega_min[i] = tp.omega_min
        omega_max[i] = tp.omega_max
        aero_scale[i] = tp.aero_scale
        lam_scale[i] = tp.lam_scale
        cp[i, :6] = tp.cp_coeffs
        cp[i, 6] = tp.cp_lam_offset
        curve_w_parts.append(op.curve_omega)
        curve_p_parts.append(op.curve_power)
        curve_off[i + 1] = curve_off[i] + len(op.curve_omega)

        code = ctrl_type[i]
        if code == _pc.CTRL_TI_PI:
            ctrl_par[i, 0] = c * kp0 / br[i]
            ctrl_par[i, 1] = c * ki0 / br[i]
            ctrl_par[i, 2] = 2.0 * alpha * sysp.inertia_h / sysp.kg
            ctrl_par[i, 3] = 2.0 * sysp.inertia_h
            ctrl_act[i] = dist_step + est_window_steps
        elif code == _pc.CTRL_PI_PROTO:
            ctrl_par[i, 0] = c * kp0 / br[i]
            ctrl_par[i, 1] = c * ki0 / br[i]
            ctrl_par[i, 2] = 2.0 * alpha * sysp.inertia_h / sysp.kg
            ctrl_par[i, 3] = -alpha * pd / sysp.kg
            ctrl_act[i] = dist_step
        elif code == _pc.CTRL_MODEL_BASED:
            ctrl_par[i, 0] = sysp.kg / alpha - sysp.damping_df
            ctrl_par[i, 1] = 1.0 / br[i]
            ctrl_act[i] = dist_step
            assumed = mirror_params.get(i, cfg.governors[f.assumed_governor].params)
            mir_type[i] = assumed.kernel_type
            mir_par[i] = assumed.kernel_params()
        elif code in (_pc.CTRL_VIC_FIXED, _pc.CTRL_VIC_ADAPTIVE):
            c_vic = c_ke if code == _pc.CTRL_VIC_ADAPTIVE else 1.0
            k_df = f.vic_k_df if f.vic_k_df is not None else tp.inertia_m
            ctrl_par[i, 0] = c_vic * k_df
            ctrl_par[i, 1] = c_vic * f.vic_k_pf
            ctrl_par[i, 2] = f.vic_t_filt
            ctrl_act[i] = dist_step
        elif code == _pc.CTRL_SIC:
            ctrl_par[i, 0] = f.sic_dp0
            ctrl_par[i, 1] = float(int(round(f.sic_tau / dt)))
            ctrl_par[i, 2] = -f.sic_dp_rec
            ctrl_act[i] = dist_step

        farm_meta.append({
            "name": f.name, "n_wt": f.n_wt, "v_w": f.v_w, "turbine": tp,
            "controller": f.controller, "gain_mode": f.gain_mode, "c": c,
            "omega0": op.omega0, "p0": op.p0, "base_ratio": br[i],
        })

    plan = KernelPlan(
        n_steps=n_steps, dt=dt, h2=2.0 * sysp.inertia_h, d_f=sysp.damping_df,
        dist_step=dist_step, pd=pd,
        gov_type=gov_type, gov_par=gov_par, gov_scale=gov_scale,
        gov_off_step=gov_off,
        ctrl_type=ctrl_type, ctrl_par=ctrl_par, ctrl_act_step=ctrl_act,
        br=br, m_wt=m_wt, v_w=v_w, omega0=omega0, p0=p0,
        omega_min=omega_min, omega_max=omega_max,
        aero_scale=aero_scale, lam_scale=lam_scale, cp=cp,
        curve_off=curve_off,
        curve_w=(np.concatenate(curve_w_parts) if curve_w_parts else np.zeros(0)),
        curve_p=(np.concatenate(curve_p_parts) if curve_p_parts else np.zeros(0)),
        mir_type=mir_type, mir_par=mir_par,
    )
    meta = {
        "system": sysp, "alpha": alpha, "gains": (kp0, ki0), "farms": farm_meta,
        "dist_step": dist_step, "pd": pd,
        "t_f": 2.0 * alpha * sysp.inertia_h / sysp.kg,
        "estimation_window_s": est_window_steps * dt,
    }
    return plan, meta


def run_scenario(cfg: ScenarioConfig,
                 backend: str | None = None,
                 mirror_params: dict[int, GovernorParams] | None = None
                 ) -> SimResult:
    """Run one scenario deterministically; bit-identical for identical
    configuration (per backend).

    Raises RuntimeError with the failing step if the state goes non-finite.
    """
    plan, meta = build_plan(cfg, mirror_params)
    out = KernelOutput.allocate(plan.n_steps, plan.n_farm)
    kern = get_backend(backend)
    kern.run_scenario(plan, out)
    if out.status != _pc.STATUS_OK:
        raise RuntimeError(
            f"simulation aborted: non-finite state at step {out.err_step} "
            f"(t = {out.err_step * plan.dt:.4f} s)")
    events = [{"t_s": float(out.events[j, 0] * plan.dt),
               "step": int(out.events[j, 0]),
               "farm": int(out.events[j, 1]),
               "event": _EV_NAMES.get(int(out.events[j, 2]), "unknown")}
              for j in range(out.n_events)]
    meta = dict(meta)
    meta["backend"] = kern.name
    meta["est_pd"] = out.est_pd.copy()
    spec_alpha = meta["alpha"]
    phat = float(out.est_pd.max()) if plan.n_farm else 0.0
    meta["trajectory_spec"] = TrajectorySpec(
        a_f=-spec_alpha * (phat if phat > 0 else plan.pd) / meta["system"].kg,
        t_f=meta["t_f"], alpha=spec_alpha,
        pd=(phat if phat > 0 else plan.pd))
    return SimResult(
        dt=plan.dt, f_nom=meta["system"].f_nom,
        df_pu=out.df, rocof_pu=out.rocof, dpm_pu=out.dpm, dpwf_pu=out.dpwf,
        omega=out.omega, p=out.p, mode=out.mode,
        events=events, meta=meta,
    )

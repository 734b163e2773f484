"""Scenario configuration: YAML schema, validation, round-trip serialization.

A scenario file has six blocks: ``system``, ``governors``, ``windfarms``,
``disturbance``, ``trajectory`` and ``sim``.  Validation is strict: unknown
keys are rejected and every violation is reported with its field path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import yaml

from .governors import (GovernorParams, IeeeG1Params, IeeeG3Params,
                        SimplifiedGovernor)
from .params import Disturbance, SystemParams
from .windfarm import TurbineParams

__all__ = ["ScenarioConfig", "GovernorBlock", "FarmBlock", "SimBlock",
           "ConfigError", "load_config", "save_config"]

CONTROLLERS = ("proposed_ti_pi", "pi_prototype", "model_based", "vic_fixed",
               "vic_adaptive", "sic", "none")
GAIN_MODES = ("fixed", "adaptive")


class ConfigError(ValueError):
    """Configuration rejected; ``errors`` lists 'path: problem' strings."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid scenario config:\n  " + "\n  ".join(self.errors))


@dataclass
class GovernorBlock:
    model: str                      # simplified | ieeeg1 | ieeeg3
    s_mva: float
    params: GovernorParams
    name: str = ""

    def droop_on_base(self, base_mva: float) -> float:
        if isinstance(self.params, IeeeG3Params):
            inv_r = self.params.inv_rp
        else:
            inv_r = self.params.inv_r
        return inv_r * self.s_mva / base_mva


@dataclass
class FarmBlock:
    name: str
    n_wt: int
    v_w: float
    controller: str = "proposed_ti_pi"
    gain_mode: str = "fixed"
    turbine: TurbineParams = field(default_factory=TurbineParams)
    # baseline-controller settings, per-unit on the turbine base
    vic_k_df: float | None = None    # default: 2*H_wt (the turbine inertia M)
    vic_k_pf: float = 8.0
    vic_t_filt: float = 0.1
    sic_dp0: float = 0.05
    sic_tau: float = 10.0
    sic_dp_rec: float = 0.025         # withdrawal-stage absorption, turbine base
    assumed_governor: int = 0        # governor index mirrored by model_based


@dataclass
class SimBlock:
    dt_s: float = 0.001
    t_end_s: float = 90.0
    seed: int = 0


@dataclass
class ScenarioConfig:
    system: SystemParams
    governors: list[GovernorBlock]
    windfarms: list[FarmBlock]
    disturbance: Disturbance | None
    alpha: float | None = None               # or derive from target nadir
    target_nadir_hz: float | None = None
    gains: tuple[float, float] | None = None  # explicit (kp0, ki0); None = design rule
    estimation_window_s: float = 0.3
    sim: SimBlock = field(default_factory=SimBlock)

    def validate(self) -> None:
        errs = []
        if not self.governors:
            errs.append("governors: at least one governor is required")
        agg = sum(g.droop_on_base(self.system.base_mva) for g in self.governors)
        if self.governors and abs(agg - self.system.droop_inv_r) > 1e-6 * max(1.0, agg):
            errs.append(
                f"system.droop_inv_r: {self.system.droop_inv_r} does not match the "
                f"governor aggregate {agg:.6f} on the system base")
        if self.alpha is None and self.target_nadir_hz is None:
            errs.append("trajectory: either alpha or target_nadir_hz is required")
        if self.alpha is not None and self.alpha < 1.0:
            errs.append(f"trajectory.alpha: must be >= 1, got {self.alpha}")
        for i, f in enumerate(self.windfarms):
            path = f"windfarms[{i}]"
            if f.controller not in CONTROLLERS:
                errs.append(f"{path}.controller: {f.controller!r} not in {CONTROLLERS}")
            if f.gain_mode not in GAIN_MODES:
                errs.append(f"{path}.gain_mode: {f.gain_mode!r} not in {GAIN_MODES}")
            if f.n_wt < 1:
                errs.append(f"{path}.n_wt: must be >= 1")
            if f.v_w <= 0.0:
                errs.append(f"{path}.v_w: must be > 0")
            if f.controller == "model_based":
                if len(self.governors) != 1:
                    errs.append(f"{path}: model_based requires a single aggregated governor")
                elif not (0 <= f.assumed_governor < len(self.governors)):
                    errs.append(f"{path}.assumed_governor: index out of range")
        if self.disturbance is not None:
            if self.disturbance.kind == "generator_trip":
                tg = self.disturbance.trip_governor
                if tg is None or not (0 <= tg < len(self.governors)):
                    errs.append("disturbance.trip_governor: index out of range")
            if self.disturbance.time >= self.sim.t_end_s:
                errs.append("disturbance.time: at or beyond sim.t_end_s")
        if self.sim.dt_s <= 0.0 or self.sim.t_end_s <= 0.0:
            errs.append("sim: dt_s and t_end_s must be > 0")
        if self.estimation_window_s <= 0.0:
            errs.append("estimation_window_s: must be > 0")
        if errs:
            raise ConfigError(errs)


# ---------------------------------------------------------------------------
# dict <-> dataclass translation
# ---------------------------------------------------------------------------

_GOV_MODELS = {
    "simplified": (SimplifiedGovernor, {"tg", "inv_r"}),
    "ieeeg1": (IeeeG1Params, {"inv_r", "k1", "k3", "k5", "k7", "t1", "t3", "t4",
                              "t5", "t6", "t7", "u_o", "u_c", "p_min", "p_max"}),
    "ieeeg3": (IeeeG3Params, {"inv_rp", "r_r", "t_g", "t_p", "t_r", "t_w",
                              "a11", "a13", "a21", "a23"}),
}

_TURBINE_KEYS = {"rated_mw", "rated_v", "j_wt", "omega_nom_rpm", "omega_min",
                 "omega_max", "cp_coeffs", "cp_lam_offset", "mppt_v_anchors",
                 "mppt_omega_anchors", "clamp_opt_v", "lam_scale", "aero_scale"}
_FARM_KEYS = {"name", "n_wt", "v_w", "controller", "gain_mode", "turbine",
              "vic_k_df", "vic_k_pf", "vic_t_filt", "sic_dp0", "sic_tau",
              "sic_dp_rec", "assumed_governor"}
_SYSTEM_KEYS = {"inertia_h", "damping_df", "droop_inv_r", "base_mva", "f_nom"}
_DIST_KEYS = {"kind", "magnitude_pu", "magnitude_mw", "time_s", "trip_governor"}
_SIM_KEYS = {"dt_s", "t_end_s", "seed"}
_TOP_KEYS = {"system", "governors", "windfarms", "disturbance", "trajectory",
             "gains", "estimation_window_s", "sim"}


def _check_keys(d: dict, allowed: set, path: str, errs: list) -> None:
    for k in d:
        if k not in allowed:
            errs.append(f"{path}.{k}: unknown key")


def config_from_dict(raw: dict) -> ScenarioConfig:
    if not isinstance(raw, dict):
        raise ConfigError(["top level: expected a mapping"])
    errs: list[str] = []
    _check_keys(raw, _TOP_KEYS, "config", errs)

    sys_raw = raw.get("system")
    if not isinstance(sys_raw, dict):
        errs.append("system: block is required")
        raise ConfigError(errs)
    _check_keys(sys_raw, _SYSTEM_KEYS, "system", errs)

    governors = []
    for i, g in enumerate(raw.get("governors") or []):
        path = f"governors[{i}]"
        model = g.get("model")
        if model not in _GOV_MODELS:
            errs.append(f"{path}.model: {model!r} not in {sorted(_GOV_MODELS)}")
            continue
        cls, keys = _GOV_MODELS[model]
        _check_keys(g, keys | {"model", "s_mva", "name"}, path, errs)
        try:
            params = cls(**{k: v for k, v in g.items()
                            if k not in ("model", "s_mva", "name")})
            governors.append(GovernorBlock(model=model, s_mva=float(g["s_mva"]),
                                           params=params, name=g.get("name", "")))
        except (TypeError, ValueError, KeyError) as exc:
            errs.append(f"{path}: {exc}")

    farms = []
    for i, f in enumerate(raw.get("windfarms") or []):
        path = f"windfarms[{i}]"
        _check_keys(f, _FARM_KEYS, path, errs)
        turbine_raw = f.get("turbine") or {}
        _check_keys(turbine_raw, _TURBINE_KEYS, f"{path}.turbine", errs)
        try:
            for seq_key in ("cp_coeffs", "mppt_v_anchors", "mppt_omega_anchors"):
                if seq_key in turbine_raw:
                    turbine_raw[seq_key] = tuple(turbine_raw[seq_key])
            turbine = TurbineParams(**turbine_raw)
            if turbine.omega_min >= turbine.omega_max:
                raise ValueError("omega_min must be < omega_max")
            farms.append(FarmBlock(
                name=str(f.get("name", f"WF{i + 1}")),
                n_wt=int(f["n_wt"]), v_w=float(f["v_w"]),
                controller=str(f.get("controller", "proposed_ti_pi")),
                gain_mode=str(f.get("gain_mode", "fixed")),
                turbine=turbine,
                vic_k_df=f.get("vic_k_df"),
                vic_k_pf=float(f.get("vic_k_pf", 8.0)),
                vic_t_filt=float(f.get("vic_t_filt", 0.1)),
                sic_dp0=float(f.get("sic_dp0", 0.05)),
                sic_tau=float(f.get("sic_tau", 10.0)),
                sic_dp_rec=float(f.get("sic_dp_rec", 0.025)),
                assumed_governor=int(f.get("assumed_governor", 0)),
            ))
        except (TypeError, ValueError, KeyError) as exc:
            errs.append(f"{path}: {exc}")

    disturbance = None
    d = raw.get("disturbance")
    if d:
        _check_keys(d, _DIST_KEYS, "disturbance", errs)
        try:
            base = float(sys_raw.get("base_mva", 100.0))
            if "magnitude_pu" in d:
                mag = float(d["magnitude_pu"])
            else:
                mag = float(d["magnitude_mw"]) / base
            disturbance = Disturbance(kind=d.get("kind", "load_surge"),
                                      magnitude_pd=mag,
                                      time=float(d.get("time_s", 0.0)),
                                      trip_governor=d.get("trip_governor"))
        except (TypeError, ValueError, KeyError) as exc:
            errs.append(f"disturbance: {exc}")

    traj = raw.get("trajectory") or {}
    _check_keys(traj, {"alpha", "target_nadir_hz"}, "trajectory", errs)

    gains = None
    graw = raw.get("gains")
    if graw not in (None, "design"):
        _check_keys(graw, {"kp0", "ki0"}, "gains", errs)
        try:
            gains = (float(graw["kp0"]), float(graw["ki0"]))
        except (TypeError, ValueError, KeyError) as exc:
            errs.append(f"gains: {exc}")

    sim_raw = raw.get("sim") or {}
    _check_keys(sim_raw, _SIM_KEYS, "sim", errs)

    try:
        system = SystemParams(**{k: float(v) for k, v in sys_raw.items()})
    except (TypeError, ValueError) as exc:
        errs.append(f"system: {exc}")
        raise ConfigError(errs)

    if errs:
        raise ConfigError(errs)

    cfg = ScenarioConfig(
        system=system,
        governors=governors,
        windfarms=farms,
        disturbance=disturbance,
        alpha=(float(traj["alpha"]) if "alpha" in traj else None),
        target_nadir_hz=(float(traj["target_nadir_hz"])
                         if "target_nadir_hz" in traj else None),
        gains=gains,
        estimation_window_s=float(raw.get("estimation_window_s", 0.3)),
        sim=SimBlock(dt_s=float(sim_raw.get("dt_s", 0.001)),
                     t_end_s=float(sim_raw.get("t_end_s", 90.0)),
                     seed=int(sim_raw.get("seed", 0))),
    )
    cfg.validate()
    return cfg


def config_to_dict(cfg: ScenarioConfig) -> dict:
    out: dict = {"system": {
        "inertia_h": cfg.system.inertia_h, "damping_df": cfg.system.damping_df,
        "droop_inv_r": cfg.system.droop_inv_r, "base_mva": cfg.system.base_mva,
        "f_nom": cfg.system.f_nom}}
    out["governors"] = []
    for g in cfg.governors:
        d = {"model": g.model, "s_mva": g.s_mva}
        if g.name:
            d["name"] = g.name
        d.update(asdict(g.params))
        out["governors"].append(d)
    out["windfarms"] = []
    defaults = TurbineParams()
    for f in cfg.windfarms:
        d = {"name": f.name, "n_wt": f.n_wt, "v_w": f.v_w,
             "controller": f.controller, "gain_mode": f.gain_mode}
        tdict = {}
        for key in sorted(_TURBINE_KEYS):
            val = getattr(f.turbine, key)
            if val != getattr(defaults, key):
                tdict[key] = list(val) if isinstance(val, tuple) else val
        if tdict:
            d["turbine"] = tdict
        for key, dflt in (("vic_k_df", None), ("vic_k_pf", 8.0),
                          ("vic_t_filt", 0.1), ("sic_dp0", 0.05),
                          ("sic_tau", 10.0), ("sic_dp_rec", 0.025),
                          ("assumed_governor", 0)):
            val = getattr(f, key)
            if val != dflt:
                d[key] = val
        out["windfarms"].append(d)
    if cfg.disturbance is not None:
        d = {"kind": cfg.disturbance.kind,
             "magnitude_pu": cfg.disturbance.magnitude_pd,
             "time_s": cfg.disturbance.time}
        if cfg.disturbance.trip_governor is not None:
            d["trip_governor"] = cfg.disturbance.trip_governor
        out["disturbance"] = d
    traj = {}
    if cfg.alpha is not None:
        traj["alpha"] = cfg.alpha
    if cfg.target_nadir_hz is not None:
        traj["target_nadir_hz"] = cfg.target_nadir_hz
    out["trajectory"] = traj
    if cfg.gains is not None:
        out["gains"] = {"kp0": cfg.gains[0], "ki0": cfg.gains[1]}
    if cfg.estimation_window_s != 0.3:
        out["estimation_window_s"] = cfg.estimation_window_s
    out["sim"] = {"dt_s": cfg.sim.dt_s, "t_end_s": cfg.sim.t_end_s,
                  "seed": cfg.sim.seed}
    return out


def load_config(path) -> ScenarioConfig:
    """Load and validate a scenario file; raises ConfigError with all
    violations and their field paths."""
    text = Path(path).read_text()
    raw = yaml.safe_load(text)
    if raw is None:
        raise ConfigError(["file is empty"])
    return config_from_dict(raw)


def save_config(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(yaml.safe_dump(config_to_dict(cfg), sort_keys=False))

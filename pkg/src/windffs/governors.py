"""Mechanical-power response of the aggregated synchronous generation.

Three governor/turbine models are supported:

* ``SimplifiedGovernor`` -- first-order droop lag, dPm = -(1/R) df / (1 + T_g s)
* ``IeeeG1`` -- standard single-shaft steam governor/turbine block diagram
  (droop lead-lag, rate- and position-limited valve, four-stage turbine with
  power fractions K1/K3/K5/K7; the cross-compound taps K2/K4/K6/K8 are zero)
* ``IeeeG3`` -- standard hydro governor (pilot servo, gate integrator with
  permanent droop and dashpot temporary droop) driving a linearized water
  column turbine with coefficients a11/a13/a21/a23

Everything is written in deviation form: zero state and zero input produce
exactly zero output.  Outputs are per-unit on the machine base; scenario
assembly converts with S_machine / S_base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace, fields

import numpy as np

# kernel model-type codes, shared with windffs._kernel
GOV_SIMPLIFIED = 0
GOV_IEEEG1 = 1
GOV_IEEEG3 = 2

# per-governor slot counts in the kernel plan
N_GOV_PAR = 16
N_GOV_STATES = 6

__all__ = ["SimplifiedGovernor", "IeeeG1Params", "IeeeG3Params", "Governor",
           "make_governor", "gov_step", "gov_freq_response", "perturb_params"]


@dataclass(frozen=True)
class SimplifiedGovernor:
    tg: float           # governor time constant, s (0 = static droop)
    inv_r: float        # droop gain 1/R on machine base

    def __post_init__(self):
        if self.tg < 0.0:
            raise ValueError(f"tg must be >= 0, got {self.tg}")
        if self.inv_r <= 0.0:
            raise ValueError(f"inv_r must be > 0, got {self.inv_r}")

    kernel_type = GOV_SIMPLIFIED

    def kernel_params(self) -> np.ndarray:
        par = np.zeros(N_GOV_PAR)
        par[0] = self.tg
        par[1] = self.inv_r
        return par

    def freq_response(self, omega: float) -> complex:
        return -self.inv_r / (1.0 + 1j * omega * self.tg)

    def dc_gain(self) -> float:
        return -self.inv_r


@dataclass(frozen=True)
class IeeeG1Params:
    """IEEEG1 steam governor/turbine, single shaft (K2=K4=K6=K8=0, T2=0)."""

    inv_r: float
    k1: float
    k3: float
    k5: float
    k7: float
    t1: float
    t3: float
    t4: float
    t5: float
    t6: float
    t7: float
    u_o: float = 0.3      # max valve opening rate, p.u./s
    u_c: float = -0.3     # max valve closing rate, p.u./s
    p_min: float = 0.0    # valve position limits (deviation form)
    p_max: float = 1.0

    def __post_init__(self):
        if not (self.u_c < 0.0 < self.u_o):
            raise ValueError(f"rate limits need u_c < 0 < u_o, got ({self.u_c}, {self.u_o})")
        if self.p_min > self.p_max:
            raise ValueError(f"p_min > p_max ({self.p_min} > {self.p_max})")
        for name in ("t1", "t3", "t4", "t5", "t6", "t7"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        if self.t3 <= 0.0:
            raise ValueError("t3 (valve servo) must be > 0")
        if self.inv_r <= 0.0:
            raise ValueError("inv_r must be > 0")

    kernel_type = GOV_IEEEG1

    def kernel_params(self) -> np.ndarray:
        par = np.zeros(N_GOV_PAR)
        par[:15] = (self.inv_r, self.t1, self.t3, self.t4, self.t5, self.t6,
                    self.t7, self.k1, self.k3, self.k5, self.k7,
                    self.u_o, self.u_c, self.p_min, self.p_max)
        return par

    def freq_response(self, omega: float) -> complex:
        s = 1j * omega
        lead = 1.0 / (1.0 + s * self.t1)
        valve = 1.0 / (1.0 + s * self.t3)
        l4 = 1.0 / (1.0 + s * self.t4)
        l5 = 1.0 / (1.0 + s * self.t5)
        l6 = 1.0 / (1.0 + s * self.t6)
        l7 = 1.0 / (1.0 + s * self.t7)
        turbine = (self.k1 * l4 + self.k3 * l4 * l5 + self.k5 * l4 * l5 * l6
                   + self.k7 * l4 * l5 * l6 * l7)
        return -self.inv_r * lead * valve * turbine

    def dc_gain(self) -> float:
        return -self.inv_r * (self.k1 + self.k3 + self.k5 + self.k7)


@dataclass(frozen=True)
class IeeeG3Params:
    """IEEEG3 hydro governor with linearized water-column turbine."""

    inv_rp: float        # permanent droop gain 1/R_p
    r_r: float           # temporary droop
    t_g: float           # gate servo time constant, s
    t_p: float           # pilot valve time constant, s
    t_r: float           # dashpot reset time, s
    t_w: float           # water starting time, s
    a11: float = 0.5
    a13: float = 1.0
    a21: float = 1.5
    a23: float = 1.0

    def __post_init__(self):
        for name in ("inv_rp", "t_g", "t_r", "t_w", "a11"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")
        for name in ("r_r", "t_p"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")

    kernel_type = GOV_IEEEG3

    @property
    def sigma(self) -> float:
        return 1.0 / self.inv_rp

    def kernel_params(self) -> np.ndarray:
        par = np.zeros(N_GOV_PAR)
        par[:10] = (self.sigma, self.r_r, self.t_g, self.t_p, self.t_r,
                    self.t_w, self.a11, self.a13, self.a21, self.a23)
        return par

    def freq_response(self, omega: float) -> complex:
        s = 1j * omega
        gate = -1.0 / (self.t_g * s * (1.0 + s * self.t_p) + self.sigma
                       + self.r_r * self.t_r * s / (1.0 + s * self.t_r))
        turbine = ((self.a23 + (self.a11 * self.a23 - self.a13 * self.a21)
                    * self.t_w * s) / (1.0 + self.a11 * self.t_w * s))
        return gate * turbine

    def dc_gain(self) -> float:
        return -self.a23 * self.inv_rp


GovernorParams = SimplifiedGovernor | IeeeG1Params | IeeeG3Params


class Governor:
    """Stateful wrapper advancing one governor model in time.

    ``step(df, dt)`` holds the frequency-deviation input over the step
    (zero-order hold) and advances the internal state with one classical
    4th-order Runge-Kutta step, applying the model's limiters where present.
    Returns the mechanical-power deviation on the machine base.
    """

    def __init__(self, params: GovernorParams):
        self.params = params
        self.state = np.zeros(N_GOV_STATES)

    def reset(self) -> None:
        self.state[:] = 0.0

    def output(self, df: float = 0.0) -> float:
        from ._kernel import backend
        return backend.gov_output(self.params.kernel_type,
                                  self.params.kernel_params(), self.state, df)

    def step(self, df: float, dt: float) -> float:
        if dt <= 0.0:
            raise ValueError(f"dt must be > 0, got {dt}")
        from ._kernel import backend
        return backend.gov_step(self.params.kernel_type,
                                self.params.kernel_params(), self.state, df, dt)

    def freq_response(self, omega: float) -> complex:
        return self.params.freq_response(omega)


def make_governor(params: GovernorParams) -> Governor:
    return Governor(params)


def gov_step(gov: Governor, df: float, dt: float) -> float:
    """One integration step; see ``Governor.step``."""
    return gov.step(df, dt)


def gov_freq_response(gov: Governor | GovernorParams, omega: float) -> complex:
    """Small-signal complex gain dPm/df at s = j*omega (limiters ignored)."""
    if omega < 0.0 or not math.isfinite(omega):
        raise ValueError(f"omega must be finite and >= 0, got {omega}")
    params = gov.params if isinstance(gov, Governor) else gov
    return params.freq_response(omega)


# fields kept out of the multiplicative perturbation (droop handled by flag,
# limits keep their nominal settings)
_NEVER_PERTURB = {"p_min", "p_max", "u_o", "u_c"}
_DROOP_FIELDS = {"inv_r", "inv_rp"}


def perturb_params(gov: GovernorParams, error_level: float, seed,
                   include_droop: bool = True,
                   max_retries: int = 100) -> GovernorParams:
    """Randomly perturbed copy: each continuous parameter scaled by an
    independent uniform factor in [1 - error_level, 1 + error_level].

    Deterministic for a given ``seed`` (int or numpy Generator).  Draws that
    would violate the parameter-set invariants are re-drawn.
    """
    if not (0.0 <= error_level <= 0.2):
        raise ValueError(f"error_level must be in [0, 0.2], got {error_level}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if error_level == 0.0:
        return gov

    names = [f.name for f in fields(gov)
             if f.name not in _NEVER_PERTURB
             and (include_droop or f.name not in _DROOP_FIELDS)]
    for _ in range(max_retries):
        factors = rng.uniform(1.0 - error_level, 1.0 + error_level, len(names))
        updates = {n: getattr(gov, n) * f for n, f in zip(names, factors)}
        try:
            return replace(gov, **updates)
        except ValueError:
            continue
    raise RuntimeError("could not draw an invariant-preserving perturbation")

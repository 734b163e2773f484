"""Fast-frequency-support control laws.

The proposed controller is a PI on the deviation between a reference
frequency and the measured frequency.  Its reference is produced without a
disturbance-anchored clock: the reference RoCoF is computed from the
measured frequency through the time-independent trajectory relation
(-df/T_f - Pd_hat/2H) and integrated.  The deficit estimate Pd_hat comes
from the average RoCoF over a short window after the event.

Also provided: the prototypical (clock-based) PI, the model-based law that
mirrors the governor dynamics, and the three comparison baselines (fixed
virtual-inertia, adaptive virtual-inertia, stepwise support).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .governors import Governor, GovernorParams
from .params import SystemParams
from .trajectory import TrajectorySpec, f_opt, reference_rocof

__all__ = ["PiGains", "scale_gains", "pi_prototype_step", "TiPiController",
           "ModelBasedFfs", "VicController", "SicController",
           "estimate_power_deficit", "ESTIMATION_WINDOW_S"]

ESTIMATION_WINDOW_S = 0.3   # RoCoF-averaging window for the deficit estimate


@dataclass(frozen=True)
class PiGains:
    kp: float
    ki: float

    def __post_init__(self):
        if not (self.kp > 0.0 and self.ki > 0.0):
            raise ValueError(f"PI gains must be > 0, got ({self.kp}, {self.ki})")


def scale_gains(base: PiGains, c: float) -> PiGains:
    """Adaptive per-farm gains: both parameters multiplied by c in [0, 1].

    c = 0 disables the farm (represented by epsilon gains to satisfy the
    positivity invariant downstream code relies on).
    """
    if not (0.0 <= c <= 1.0):
        raise ValueError(f"adaptive gain c must be in [0, 1], got {c}")
    if c == 0.0:
        return replace(base, kp=1e-300, ki=1e-300)
    return replace(base, kp=c * base.kp, ki=c * base.ki)


@dataclass
class PiState:
    integral: float = 0.0   # integral of the tracking error, p.u.*s


def pi_prototype_step(state: PiState, e_f: float, gains: PiGains, dt: float) -> float:
    """One step of the prototypical PI law; trapezoidal integrator update.

    Returns the support-power command for the *end* of the step.
    """
    state.integral += e_f * dt
    return gains.kp * e_f + gains.ki * state.integral


class TiPiController:
    """Time-independent PI support controller for one farm.

    Inactive until ``activate`` is called (normally at disturbance time +
    estimation window).  The reference integrator starts at the measured
    frequency, so support ramps from zero without an error step.
    """

    def __init__(self, gains: PiGains, spec_alpha: float, params: SystemParams):
        self.gains = gains
        self.alpha = spec_alpha
        self.params = params
        self.t_f = 2.0 * spec_alpha * params.inertia_h / params.kg
        self.active = False
        self.pd_hat = 0.0
        self.df_ref = 0.0
        self.err_int = 0.0

    def activate(self, df_meas: float, pd_hat: float) -> None:
        self.active = True
        self.pd_hat = pd_hat
        self.df_ref = df_meas
        self.err_int = 0.0

    def spec(self) -> TrajectorySpec:
        a_f = -self.alpha * self.pd_hat / self.params.kg
        return TrajectorySpec(a_f=a_f, t_f=self.t_f, alpha=self.alpha, pd=self.pd_hat)

    def step(self, df_act: float, dt: float) -> float:
        """Advance one step (forward-Euler reference, trapezoid-free PI to
        match the scenario kernel's stage structure) and return the
        support-power command on the system base."""
        if not self.active:
            return 0.0
        ref_rate = -df_act / self.t_f - self.pd_hat / (2.0 * self.params.inertia_h)
        self.df_ref += ref_rate * dt
        e = self.df_ref - df_act
        self.err_int += e * dt
        return self.gains.kp * e + self.gains.ki * self.err_int


class ModelBasedFfs:
    """Mirror-the-governor law: dP = -G_gov_assumed(s) df - K_w df.

    K_w = K_g/alpha - D_f, which closes the loop onto the trajectory
    identity (2Hs + K_g/alpha) df = -P_d/s when the assumed model matches
    the real governor.  The assumed model may be a perturbed copy.
    """

    def __init__(self, assumed: GovernorParams, params: SystemParams, alpha: float):
        self.gov = Governor(assumed)
        self.k_w = params.kg / alpha - params.damping_df

    def step(self, df_act: float, dt: float) -> float:
        mirror = self.gov.step(df_act, dt)
        return -mirror - self.k_w * df_act


class VicController:
    """Virtual-inertia baseline: dP = -k_df * d(df)/dt - k_pf * df.

    The RoCoF is measured through a first-order filter (time constant
    ``t_filt``).  ``c`` scales both gains for the adaptive variant.
    """

    def __init__(self, k_df: float, k_pf: float, t_filt: float = 0.1, c: float = 1.0):
        if t_filt <= 0.0:
            raise ValueError("t_filt must be > 0")
        self.k_df = c * k_df
        self.k_pf = c * k_pf
        self.t_filt = t_filt
        self.z = 0.0

    def step(self, df_act: float, dt: float) -> float:
        rocof_est = (df_act - self.z) / self.t_filt
        self.z += rocof_est * dt
        return -self.k_df * rocof_est - self.k_pf * df_act


class SicController:
    """Stepwise baseline: constant overproduction dp0 for ``tau`` seconds,
    then withdrawal to tracking-curve recovery."""

    def __init__(self, dp0: float = 0.1, tau: float = 10.0):
        if dp0 <= 0.0 or tau <= 0.0:
            raise ValueError("dp0 and tau must be > 0")
        self.dp0 = dp0
        self.tau = tau

    def command(self, t_since_activation: float) -> float | None:
        """Support power while active; None once the withdrawal has begun."""
        if t_since_activation < self.tau:
            return self.dp0
        return None


def estimate_power_deficit(times, freq_dev, params: SystemParams,
                           window: float = ESTIMATION_WINDOW_S) -> float:
    """Deficit magnitude from the average initial RoCoF (p.u., system base).

    ``times`` (s) and ``freq_dev`` (p.u.) must cover [t0, t0 + window] where
    t0 is the event instant (first sample).  With several farm measurements
    of a uniform frequency the per-farm average reduces to this expression:

        Pd_hat = -2H * (df(t0 + window) - df(t0)) / window
    """
    t = np.asarray(times, dtype=float)
    f = np.asarray(freq_dev, dtype=float)
    if t.size < 2 or t.size != f.size:
        raise ValueError("need at least two (time, frequency) samples")
    if t[-1] - t[0] < window - 1e-9:
        raise ValueError(f"samples span {t[-1] - t[0]:.3f}s < window {window}s")
    t0 = t[0]
    f0 = f[0]
    f1 = float(np.interp(t0 + window, t, f))
    return -2.0 * params.inertia_h * (f1 - f0) / window

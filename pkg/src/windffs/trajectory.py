"""Optimal frequency trajectory.

After a power deficit the target frequency excursion follows a saturating
exponential: df(t) = A_f * (1 - exp(-t/T_f)).  The two free constants are
fixed by the initial rate of change of frequency (-P_d / 2H, pure inertial
response) and by the chosen nadir, expressed through the nadir-to-steady-state
ratio alpha:

    A_f = -alpha * P_d / K_g        T_f = 2 * alpha * H / K_g

The same curve has a time-independent form relating the frequency deviation
directly to its rate:

    d(df)/dt = -df / T_f - P_d / (2H)

which is what the runtime controller integrates (it needs no clock anchored
at the disturbance).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .params import SystemParams

__all__ = ["TrajectorySpec", "make_spec", "alpha_for_nadir", "f_opt",
           "rocof_opt", "reference_rocof"]


@dataclass(frozen=True)
class TrajectorySpec:
    """Frequency-excursion target: df(t) = a_f * (1 - exp(-t/t_f)), per-unit."""

    a_f: float      # asymptotic excursion (nadir), p.u., negative for deficits
    t_f: float      # time constant, s
    alpha: float    # nadir / steady-state excursion ratio, >= 1
    pd: float       # power deficit the trajectory was built for, p.u.

    def nadir_hz(self, f_nom: float = 50.0) -> float:
        return self.a_f * f_nom

    def report(self, f_nom: float = 50.0) -> str:
        lines = [
            "frequency trajectory target",
            f"  A_f      = {self.a_f: .6f} p.u. ({self.nadir_hz(f_nom): .4f} Hz)",
            f"  T_f      = {self.t_f: .6f} s",
            f"  alpha    = {self.alpha: .4f}",
            f"  P_d      = {self.pd: .6f} p.u.",
        ]
        return "\n".join(lines)


def make_spec(params: SystemParams, pd: float, alpha: float) -> TrajectorySpec:
    """Build the trajectory for a deficit ``pd`` (p.u.) and ratio ``alpha``.

    alpha < 1 is rejected: the wind farms would have to hold the frequency
    above its natural settling point forever, so the rotor-speed recovery
    time diverges.  Values below 1.1 are allowed but get a warning for the
    same (finite but long) recovery reason.
    """
    if not (math.isfinite(pd) and pd > 0.0):
        raise ValueError(f"power deficit must be positive and finite, got {pd}")
    if not math.isfinite(alpha) or alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if alpha < 1.1:
        warnings.warn(
            f"alpha = {alpha:.3f} < 1.1 leads to a very slow kinetic-energy "
            "recovery of the supporting wind farms", stacklevel=2)
    a_f = -alpha * pd / params.kg
    t_f = 2.0 * alpha * params.inertia_h / params.kg
    return TrajectorySpec(a_f=a_f, t_f=t_f, alpha=alpha, pd=pd)


def alpha_for_nadir(params: SystemParams, pd: float, target_nadir_hz: float) -> float:
    """Ratio alpha that places the trajectory nadir at ``target_nadir_hz``.

    ``target_nadir_hz`` is the magnitude of the allowed excursion (e.g. 0.2
    for a +/-0.2 Hz band on a 50 Hz system).
    """
    ss = abs(params.steady_state_deviation_hz(pd))
    if ss == 0.0:
        raise ValueError("zero steady-state excursion; alpha undefined")
    return abs(target_nadir_hz) / ss


def f_opt(spec: TrajectorySpec, t):
    """Trajectory frequency deviation at time(s) ``t`` (s), p.u."""
    import numpy as np

    t = np.asarray(t, dtype=float)
    out = spec.a_f * (1.0 - np.exp(-t / spec.t_f))
    return float(out) if out.ndim == 0 else out


def rocof_opt(spec: TrajectorySpec, t):
    """Trajectory rate of change of frequency at ``t``, p.u./s."""
    import numpy as np

    t = np.asarray(t, dtype=float)
    out = (spec.a_f / spec.t_f) * np.exp(-t / spec.t_f)
    return float(out) if out.ndim == 0 else out


def reference_rocof(spec: TrajectorySpec, df_act: float, params: SystemParams) -> float:
    """Time-independent form: reference RoCoF from the measured deviation.

    Identical to rocof_opt along the trajectory itself; integrating it from
    the activation instant reproduces the optimal curve from any starting
    frequency.
    """
    return -df_act / spec.t_f - spec.pd / (2.0 * params.inertia_h)

"""Aggregated wind-farm physics.

A farm is modelled as one equivalent turbine (all units identical) with

* aerodynamic capture  P_a = aero_scale * v^3 * Cp(lambda),  lambda = lam_scale * omega / v,
  using the standard exponential Cp approximation (Heier coefficients),
  pitch fixed at zero;
* single-mass shaft  d(omega)/dt = (P_a - P_elec) / (M * omega)  with the
  per-unit inertia M derived from the physical rotor inertia and nominal speed;
* a tabulated maximum-power-point curve.  The speed map omega_opt(v) is a
  monotone piecewise-linear interpolation through the operating-point anchors
  (clamped to the rotor-speed limits) and the power curve is the aerodynamic
  power along that locus.  The anchors pin the published operating points
  exactly, which a single cubic k*omega^3 law cannot do (the anchor
  speed/wind ratio drifts by about 1%); a fitted cubic coefficient is still
  exposed for reporting.

Powers are per-unit on the turbine's rated-MW base; scenario assembly
converts to the system base with n_wt * rated_mw / base_mva.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["TurbineParams", "WindFarmState", "FarmOperatingPoint",
           "aero_power", "mppt_speed", "mppt_power", "build_mppt_curve",
           "operating_point", "kinetic_energy", "adaptive_gain",
           "shaft_step", "exit_check", "aggregate_support",
           "MODE_MPPT", "MODE_FFS", "MODE_EXIT"]

MODE_MPPT = 0
MODE_FFS = 1
MODE_EXIT = 2

# exponential Cp(lambda) approximation, beta = 0
_CP_DEFAULT = (0.5176, 116.0, 0.4, 5.0, 21.0, 0.0068)
_CP_LAM_OFFSET = 0.035
_CP_LAMBDA_OPT = 8.100105          # argmax of the default surface
# published operating points: wind speed (m/s) -> steady rotor speed (p.u.)
_ANCHOR_V = (6.5, 7.5, 8.5, 9.5)
_ANCHOR_OMEGA = (0.7852, 0.9063, 1.0387, 1.1619)


def _cp_value(lam: float, coeffs, lam_offset: float) -> float:
    """Aerodynamic factor at tip-speed ratio ``lam`` (pitch = 0), clamped >= 0."""
    c1, c2, c3, c4, c5, c6 = coeffs
    if lam <= 0.0:
        return 0.0
    inv_li = 1.0 / lam - lam_offset
    cp = c1 * (c2 * inv_li - c4) * math.exp(-c5 * inv_li) + c6 * lam
    return cp if cp > 0.0 else 0.0


@dataclass(frozen=True)
class TurbineParams:
    """Equivalent-turbine constants (defaults: 5 MW DFIG unit).

    ``aero_scale`` (folds 0.5*rho*pi*R^2 and the base power) and ``lam_scale``
    (folds blade radius and speed base into lambda = lam_scale * omega / v)
    default to a calibration that puts rated power at ``rated_v`` with the
    rotor on the upper speed clamp and centres the Cp optimum on the
    mid-range operating point.
    """

    rated_mw: float = 5.0
    rated_v: float = 11.0            # m/s, rated wind speed
    j_wt: float = 1993.285           # kg*m^2, rotor+turbine inertia
    omega_nom_rpm: float = 1484.153  # speed base (1.0 p.u.)
    omega_min: float = 0.7
    omega_max: float = 1.2
    cp_coeffs: tuple = _CP_DEFAULT
    cp_lam_offset: float = _CP_LAM_OFFSET
    mppt_v_anchors: tuple = _ANCHOR_V
    mppt_omega_anchors: tuple = _ANCHOR_OMEGA
    clamp_opt_v: float = 10.5        # m/s, wind at which the speed clamp is aero-optimal
    lam_scale: float | None = None
    aero_scale: float | None = None

    def __post_init__(self):
        if not (0.0 < self.omega_min < self.omega_max):
            raise ValueError(
                f"need 0 < omega_min < omega_max, got ({self.omega_min}, {self.omega_max})")
        for name in ("rated_mw", "rated_v", "j_wt", "omega_nom_rpm"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")
        if len(self.mppt_v_anchors) != len(self.mppt_omega_anchors):
            raise ValueError("anchor arrays must have equal length")
        if list(self.mppt_v_anchors) != sorted(self.mppt_v_anchors):
            raise ValueError("anchor winds must be increasing")
        if list(self.mppt_omega_anchors) != sorted(self.mppt_omega_anchors):
            raise ValueError("anchor speeds must be increasing")
        if self.lam_scale is None:
            # Tip-speed-ratio scale anchored so the upper speed clamp is
            # aerodynamically optimal at ``clamp_opt_v`` (the highest listed
            # operating wind).  The tracking map then never commands a speed
            # below the aerodynamic optimum, so support-phase deceleration
            # first moves capture toward the Cp plateau instead of off it.
            object.__setattr__(self, "lam_scale",
                               _CP_LAMBDA_OPT * self.clamp_opt_v / self.omega_max)
        if self.aero_scale is None:
            # rated (1 p.u.) capture at rated wind with the rotor on the clamp
            lam = self.lam_scale * self.omega_max / self.rated_v
            cp = _cp_value(lam, self.cp_coeffs, self.cp_lam_offset)
            object.__setattr__(self, "aero_scale", 1.0 / (self.rated_v ** 3 * cp))

    # -- derived constants ------------------------------------------------

    @property
    def inertia_m(self) -> float:
        """Per-unit shaft inertia M = J*Omega_nom^2 / P_rated, seconds.

        Stored kinetic energy at speed omega (p.u.) is 0.5*M*omega^2 in
        per-unit-seconds on the turbine base.
        """
        omega_b = self.omega_nom_rpm * 2.0 * math.pi / 60.0
        return self.j_wt * omega_b * omega_b / (self.rated_mw * 1e6)

    @property
    def k_v(self) -> float:
        """Nominal linear speed-map slope (least-squares over the anchors)."""
        v = np.asarray(self.mppt_v_anchors)
        w = np.asarray(self.mppt_omega_anchors)
        return float(np.dot(v, w) / np.dot(v, v))

    @property
    def k_opt(self) -> float:
        """Nominal cubic coefficient of the power curve (least-squares fit)."""
        omegas, powers = build_mppt_curve(self)
        w3 = omegas ** 3
        return float(np.dot(w3, powers) / np.dot(w3, w3))

    # -- speed map ---------------------------------------------------------

    def _map_knots(self):
        """Anchor map extended to the speed clamps by the edge slopes."""
        v = list(self.mppt_v_anchors)
        w = list(self.mppt_omega_anchors)
        slope_lo = (w[1] - w[0]) / (v[1] - v[0])
        slope_hi = (w[-1] - w[-2]) / (v[-1] - v[-2])
        if w[0] > self.omega_min:
            v.insert(0, v[0] - (w[0] - self.omega_min) / slope_lo)
            w.insert(0, self.omega_min)
        if w[-1] < self.omega_max:
            v.append(v[-1] + (self.omega_max - w[-1]) / slope_hi)
            w.append(self.omega_max)
        return np.asarray(v), np.asarray(w)

    def _map_speed(self, v_w: float) -> float:
        vk, wk = self._map_knots()
        return float(np.clip(np.interp(v_w, vk, wk), self.omega_min, self.omega_max))


def aero_power(v_w: float, omega_r: float, params: TurbineParams) -> float:
    """Aerodynamic capture, p.u. on the turbine base."""
    if v_w < 0.0:
        raise ValueError(f"wind speed must be >= 0, got {v_w}")
    if omega_r <= 0.0:
        raise ValueError(f"rotor speed must be > 0, got {omega_r}")
    if v_w == 0.0:
        return 0.0
    lam = params.lam_scale * omega_r / v_w
    cp = _cp_value(lam, params.cp_coeffs, params.cp_lam_offset)
    return params.aero_scale * v_w ** 3 * cp


def mppt_speed(v_w: float, params: TurbineParams) -> float:
    """Tracking-target rotor speed for wind ``v_w``, clamped to the limits."""
    if v_w <= 0.0:
        raise ValueError(f"wind speed must be > 0, got {v_w}")
    return params._map_speed(v_w)


def build_mppt_curve(params: TurbineParams, extra_v: float | None = None):
    """Power-speed curve knots (omega, p) along the tracking locus.

    ``extra_v`` inserts the locus point of one more wind speed, which makes
    that wind's operating point an exact knot (used per farm so that the
    pre-disturbance state is an exact equilibrium of the tabulated curve).
    """
    vk, _ = params._map_knots()
    vs = list(vk)
    if extra_v is not None and min(vs) < extra_v < max(vs):
        vs = sorted(set(vs + [extra_v]))
    omegas, powers = [], []
    for v in vs:
        w = params._map_speed(v)
        p = aero_power(v, w, params)
        if omegas and w <= omegas[-1] + 1e-12:
            continue
        omegas.append(w)
        powers.append(p)
    return np.asarray(omegas), np.asarray(powers)


def mppt_power(omega_r: float, params: TurbineParams,
               curve=None) -> float:
    """Tracking-curve electrical power at rotor speed ``omega_r``, p.u.

    Linear interpolation between the curve knots; extended by the end-segment
    slopes outside [omega_min, omega_max] (clamped at zero power).
    """
    if curve is None:
        curve = build_mppt_curve(params)
    omegas, powers = curve
    return _interp_extrap(omega_r, omegas, powers)


def _interp_extrap(x: float, xs, ys) -> float:
    n = len(xs)
    if x <= xs[0]:
        slope = (ys[1] - ys[0]) / (xs[1] - xs[0])
        return max(0.0, ys[0] + slope * (x - xs[0]))
    if x >= xs[n - 1]:
        slope = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2])
        return max(0.0, ys[n - 1] + slope * (x - xs[n - 1]))
    j = int(np.searchsorted(xs, x, side="right")) - 1
    return ys[j] + (ys[j + 1] - ys[j]) / (xs[j + 1] - xs[j]) * (x - xs[j])


@dataclass
class FarmOperatingPoint:
    omega0: float        # pre-disturbance rotor speed, p.u.
    p0: float            # pre-disturbance electrical power, p.u. (turbine base)
    curve_omega: np.ndarray
    curve_power: np.ndarray


def operating_point(v_w: float, params: TurbineParams) -> FarmOperatingPoint:
    """Steady operating point for constant wind ``v_w``.

    The wind's own locus point is inserted as a curve knot, so the returned
    (omega0, p0) is an exact torque-balance equilibrium of the tabulated
    curve against the aerodynamic surface.
    """
    omega0 = mppt_speed(v_w, params)
    curve_w, curve_p = build_mppt_curve(params, extra_v=v_w)
    if omega0 >= params.omega_max:
        p0 = aero_power(v_w, params.omega_max, params)  # on the speed clamp
    else:
        p0 = mppt_power(omega0, params, (curve_w, curve_p))
    return FarmOperatingPoint(omega0=omega0, p0=p0,
                              curve_omega=curve_w, curve_power=curve_p)


@dataclass
class WindFarmState:
    """Aggregated farm state: ``n_wt`` identical turbines at wind ``v_w``."""

    n_wt: int
    v_w: float
    params: TurbineParams = field(default_factory=TurbineParams)
    mode: int = MODE_MPPT
    omega_r: float = 0.0
    p_wt0: float = 0.0
    _op: FarmOperatingPoint | None = None

    def __post_init__(self):
        if self.n_wt < 1:
            raise ValueError("n_wt must be >= 1")
        if self._op is None:
            self._op = operating_point(self.v_w, self.params)
        if self.omega_r == 0.0:
            self.omega_r = self._op.omega0
        if self.p_wt0 == 0.0:
            self.p_wt0 = self._op.p0

    @property
    def omega0(self) -> float:
        return self._op.omega0

    @property
    def e_k0(self) -> float:
        return 0.5 * self.params.inertia_m * self.omega0 ** 2

    @property
    def e_kmin(self) -> float:
        return 0.5 * self.params.inertia_m * self.params.omega_min ** 2

    @property
    def e_kmax(self) -> float:
        return 0.5 * self.params.inertia_m * self.params.omega_max ** 2

    def mppt_power_at(self, omega_r: float) -> float:
        return mppt_power(omega_r, self.params,
                          (self._op.curve_omega, self._op.curve_power))


def kinetic_energy(state: WindFarmState, omega_r: float | None = None) -> float:
    """Stored kinetic energy 0.5*M*omega^2, p.u.-seconds on the farm base."""
    w = state.omega_r if omega_r is None else omega_r
    return 0.5 * state.params.inertia_m * w * w


def adaptive_gain(state: WindFarmState) -> float:
    """Normalized pre-disturbance releasable kinetic energy, in [0, 1].

    c = (E_k0 - E_k_min) / (E_k_max - E_k_min); farms with more stored
    energy take a proportionally larger share of the support task.
    """
    span = state.e_kmax - state.e_kmin
    if span <= 0.0:
        raise ValueError("degenerate speed limits: e_kmax == e_kmin")
    c = (state.e_k0 - state.e_kmin) / span
    return min(1.0, max(0.0, c))


def shaft_step(state: WindFarmState, p_elec: float, dt: float) -> WindFarmState:
    """Advance the single-mass shaft one RK4 step at fixed electrical power."""
    if state.omega_r <= 0.0:
        raise ValueError("rotor speed must stay > 0")
    m = state.params.inertia_m

    def deriv(w):
        return (aero_power(state.v_w, w, state.params) - p_elec) / (m * w)

    w = state.omega_r
    k1 = deriv(w)
    k2 = deriv(w + 0.5 * dt * k1)
    k3 = deriv(w + 0.5 * dt * k2)
    k4 = deriv(w + dt * k3)
    state.omega_r = w + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return state


def exit_check(state: WindFarmState, p_cmd: float) -> str:
    """Support-exit rule: leave FFS once the commanded power intersects the
    tracking curve while the rotor is still below its pre-disturbance speed.

    Returns "switch_to_MPPT" or "stay_FFS".  The switch is one-way; after it
    the power follows the tracking curve, which restores the initial
    operating point under constant wind.
    """
    if state.mode != MODE_FFS:
        raise ValueError("exit_check applies to farms in FFS mode")
    if p_cmd <= state.mppt_power_at(state.omega_r) and state.omega_r < state.omega0:
        return "switch_to_MPPT"
    return "stay_FFS"


def aggregate_support(farms, base_mva: float) -> float:
    """Total farm support on the system base: sum of (p - p0) * n*S_wt/S_base.

    ``farms`` is an iterable of (state, p_wt) pairs with p_wt on the turbine
    base.
    """
    if base_mva <= 0.0:
        raise ValueError("base_mva must be > 0")
    total = 0.0
    for state, p_wt in farms:
        ratio = state.n_wt * state.params.rated_mw / base_mva
        total += (p_wt - state.p_wt0) * ratio
    return total

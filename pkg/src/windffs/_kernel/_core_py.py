"""Pure-Python stepping kernel.

Reference implementation of the scenario integrator: classical 4th-order
Runge-Kutta at a fixed step for the coupled swing/governor/shaft/controller
states, with discrete events (disturbance onset, support activation, exit
switching, stall protection) snapped to step boundaries.

The compiled kernel (_core_cy.pyx) is an arithmetic twin of this module:
same operations in the same order, so both backends produce the same
trajectories to the last bit.  Keep any change here mirrored there.
"""

from __future__ import annotations

from math import exp, isfinite, pow as fpow

import numpy as np

from ._plan import (
    CTRL_MODEL_BASED, CTRL_NONE, CTRL_PI_PROTO, CTRL_SIC, CTRL_TI_PI,
    CTRL_VIC_ADAPTIVE, CTRL_VIC_FIXED, EV_ACTIVATE, EV_EXIT_MPPT, EV_SIC_WITHDRAW,
    EV_STALL, GOV_IEEEG1, GOV_IEEEG3, GOV_SIMPLIFIED, MODE_EXIT, MODE_FFS,
    MODE_MPPT, N_GOV_STATES, STATUS_NAN, STATUS_OK, KernelOutput, KernelPlan,
)

name = "python"
compiled = False


# ---------------------------------------------------------------------------
# governor dynamics (deviation form, machine base)
# ---------------------------------------------------------------------------

def gov_output(gtype: int, par, s, df: float) -> float:
    """Mechanical-power deviation of one governor at state ``s``, input ``df``."""
    if gtype == GOV_SIMPLIFIED:
        tg = par[0]
        if tg > 0.0:
            return s[0]
        return -par[1] * df
    if gtype == GOV_IEEEG1:
        # par: inv_r,t1,t3,t4,t5,t6,t7,k1,k3,k5,k7,uo,uc,pmin,pmax
        prev = s[1]
        out = 0.0
        for i in range(4):
            ti = par[3 + i]
            if ti > 0.0:
                val = s[2 + i]
            else:
                val = prev
            out += par[7 + i] * val
            prev = val
        return out
    # GOV_IEEEG3; par: sigma,rr,tg,tp,tr,tw,a11,a13,a21,a23
    g = s[1]
    xw = s[3]
    return par[9] * g - (par[8] * par[7] / par[6]) * (g - xw)


def gov_deriv(gtype: int, par, s, df: float, ds) -> None:
    """State derivative of one governor; writes into ``ds``."""
    for i in range(N_GOV_STATES):
        ds[i] = 0.0
    if gtype == GOV_SIMPLIFIED:
        tg = par[0]
        if tg > 0.0:
            ds[0] = (-par[1] * df - s[0]) / tg
        return
    if gtype == GOV_IEEEG1:
        inv_r = par[0]
        t1 = par[1]
        t3 = par[2]
        uo = par[11]
        uc = par[12]
        pmin = par[13]
        pmax = par[14]
        if t1 > 0.0:
            x1 = s[0]
            ds[0] = (-inv_r * df - s[0]) / t1
        else:
            x1 = -inv_r * df
        v = (x1 - s[1]) / t3
        if v > uo:
            v = uo
        elif v < uc:
            v = uc
        if s[1] >= pmax and v > 0.0:
            v = 0.0
        elif s[1] <= pmin and v < 0.0:
            v = 0.0
        ds[1] = v
        prev = s[1]
        for i in range(4):
            ti = par[3 + i]
            if ti > 0.0:
                ds[2 + i] = (prev - s[2 + i]) / ti
                prev = s[2 + i]
            # ti == 0: stage is a pass-through, state unused
        return
    # GOV_IEEEG3
    sigma = par[0]
    rr = par[1]
    tg3 = par[2]
    tp = par[3]
    tr = par[4]
    tw = par[5]
    a11 = par[6]
    g = s[1]
    u = -df - sigma * g - rr * (g - s[2])
    if tp > 0.0:
        xp = s[0]
        ds[0] = (u - s[0]) / tp
    else:
        xp = u
    ds[1] = xp / tg3
    ds[2] = (g - s[2]) / tr
    ds[3] = (g - s[3]) / (a11 * tw)


def gov_step(gtype: int, par, s, df: float, dt: float) -> float:
    """One RK4 step of a standalone governor with ``df`` held; returns output."""
    k1 = np.zeros(N_GOV_STATES)
    k2 = np.zeros(N_GOV_STATES)
    k3 = np.zeros(N_GOV_STATES)
    k4 = np.zeros(N_GOV_STATES)
    tmp = np.zeros(N_GOV_STATES)
    gov_deriv(gtype, par, s, df, k1)
    for i in range(N_GOV_STATES):
        tmp[i] = s[i] + 0.5 * dt * k1[i]
    gov_deriv(gtype, par, tmp, df, k2)
    for i in range(N_GOV_STATES):
        tmp[i] = s[i] + 0.5 * dt * k2[i]
    gov_deriv(gtype, par, tmp, df, k3)
    for i in range(N_GOV_STATES):
        tmp[i] = s[i] + dt * k3[i]
    gov_deriv(gtype, par, tmp, df, k4)
    for i in range(N_GOV_STATES):
        s[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    gov_enforce_limits(gtype, par, s)
    return gov_output(gtype, par, s, df)


def gov_enforce_limits(gtype: int, par, s) -> None:
    """Clamp limited states after an integration step (the stage arithmetic
    of a Runge-Kutta step can leave them marginally outside)."""
    if gtype == GOV_IEEEG1:
        if s[1] > par[14]:
            s[1] = par[14]
        elif s[1] < par[13]:
            s[1] = par[13]


# ---------------------------------------------------------------------------
# farm aerodynamics and tracking curve
# ---------------------------------------------------------------------------

def aero_power(vw: float, om: float, aero_scale: float, lam_scale: float, cp) -> float:
    if vw <= 0.0:
        return 0.0
    lam = lam_scale * om / vw
    if lam <= 0.0:
        return 0.0
    inv_li = 1.0 / lam - cp[6]
    val = cp[0] * (cp[1] * inv_li - cp[3]) * exp(-cp[4] * inv_li) + cp[5] * lam
    if val < 0.0:
        val = 0.0
    return aero_scale * fpow(vw, 3.0) * val


def curve_power(om: float, ws, ps, lo: int, hi: int) -> float:
    """Tracking-curve interpolation over knots ws[lo:hi], ps[lo:hi]."""
    n = hi - lo
    if om <= ws[lo]:
        slope = (ps[lo + 1] - ps[lo]) / (ws[lo + 1] - ws[lo])
        val = ps[lo] + slope * (om - ws[lo])
        return val if val > 0.0 else 0.0
    if om >= ws[lo + n - 1]:
        slope = (ps[lo + n - 1] - ps[lo + n - 2]) / (ws[lo + n - 1] - ws[lo + n - 2])
        val = ps[lo + n - 1] + slope * (om - ws[lo + n - 1])
        return val if val > 0.0 else 0.0
    j = lo
    while j + 1 < lo + n - 1 and ws[j + 1] <= om:
        j += 1
    return ps[j] + (ps[j + 1] - ps[j]) / (ws[j + 1] - ws[j]) * (om - ws[j])


# ---------------------------------------------------------------------------
# scenario integrator
# ---------------------------------------------------------------------------

def _farm_power(p: KernelPlan, f: int, mode: int, active: int, df: float,
                om: float, cs, ms, tau: float) -> float:
    """Electrical power of farm ``f`` (turbine base) in the given mode.

    ``tau`` is time since the disturbance (for the clock-based controller).
    """
    lo = p.curve_off[f]
    hi = p.curve_off[f + 1]
    ct = p.ctrl_type[f]
    if mode == MODE_FFS and active:
        par = p.ctrl_par[f]
        if ct == CTRL_TI_PI:
            e = cs[0] - df
            dp = par[0] * e + par[1] * cs[1]
            pw = p.p0[f] + dp
        elif ct == CTRL_PI_PROTO:
            ref = par[3] * (1.0 - exp(-tau / par[2]))
            e = ref - df
            dp = par[0] * e + par[1] * cs[0]
            pw = p.p0[f] + dp
        elif ct == CTRL_MODEL_BASED:
            mir_out = gov_output(p.mir_type[f], p.mir_par[f], ms, df)
            dp_sys = -mir_out - par[0] * df
            pw = p.p0[f] + dp_sys * par[1]
        elif ct == CTRL_VIC_FIXED or ct == CTRL_VIC_ADAPTIVE:
            rocof_est = (df - cs[0]) / par[2]
            dp = -par[0] * rocof_est - par[1] * df
            pw = p.p0[f] + dp
        elif ct == CTRL_SIC:
            # staged: constant overproduction, then constant absorption
            pw = p.p0[f] + (par[0] if par[4] == 0.0 else par[2])
        else:
            pw = curve_power(om, p.curve_w, p.curve_p, lo, hi)
        return pw if pw > 0.0 else 0.0
    # MPPT / recovery: follow the tracking curve, hold at the upper clamp
    omx = p.omega_max[f]
    if om >= omx:
        pw = curve_power(omx, p.curve_w, p.curve_p, lo, hi)
        pa = aero_power(p.v_w[f], om, p.aero_scale[f], p.lam_scale[f], p.cp[f])
        if pa > pw:
            pw = pa
    else:
        pw = curve_power(om, p.curve_w, p.curve_p, lo, hi)
    return pw if pw > 0.0 else 0.0


def run_scenario(p: KernelPlan, out: KernelOutput) -> None:
    n_gov = p.n_gov
    n_farm = p.n_farm
    dt = p.dt

    df = 0.0
    gs = np.zeros((n_gov, N_GOV_STATES))
    om = p.omega0.copy()
    cs = np.zeros((n_farm, 4))
    ms = np.zeros((n_farm, N_GOV_STATES))
    mode = np.zeros(n_farm, dtype=np.int64)
    active = np.zeros(n_farm, dtype=np.int64)

    # stage buffers
    k_df = [0.0, 0.0, 0.0, 0.0]
    k_gs = [np.zeros((n_gov, N_GOV_STATES)) for _ in range(4)]
    k_om = [np.zeros(n_farm) for _ in range(4)]
    k_cs = [np.zeros((n_farm, 4)) for _ in range(4)]
    k_ms = [np.zeros((n_farm, N_GOV_STATES)) for _ in range(4)]
    t_gs = np.zeros((n_gov, N_GOV_STATES))
    t_om = np.zeros(n_farm)
    t_cs = np.zeros((n_farm, 4))
    t_ms = np.zeros((n_farm, N_GOV_STATES))

    def deriv(stage: int, t: float, dist_on: int, dfv: float, gsv, omv, csv, msv,
              record: bool, k: int) -> None:
        """Evaluate derivatives of all continuous states into stage buffers."""
        dpm = 0.0
        for gi in range(n_gov):
            off = p.gov_off_step[gi]
            if off >= 0 and k >= off:
                for i in range(N_GOV_STATES):
                    k_gs[stage][gi, i] = 0.0
                continue
            gov_deriv(p.gov_type[gi], p.gov_par[gi], gsv[gi], dfv, k_gs[stage][gi])
            dpm += gov_output(p.gov_type[gi], p.gov_par[gi], gsv[gi], dfv) * p.gov_scale[gi]
        dpwf = 0.0
        tau = t - p.dist_step * dt
        for fi in range(n_farm):
            pw = _farm_power(p, fi, mode[fi], active[fi], dfv, omv[fi],
                             csv[fi], msv[fi], tau)
            pa = aero_power(p.v_w[fi], omv[fi], p.aero_scale[fi],
                            p.lam_scale[fi], p.cp[fi])
            k_om[stage][fi] = (pa - pw) / (p.m_wt[fi] * omv[fi])
            dpwf += (pw - p.p0[fi]) * p.br[fi]
            # controller state derivatives
            ct = p.ctrl_type[fi]
            for i in range(4):
                k_cs[stage][fi, i] = 0.0
            par = p.ctrl_par[fi]
            if ct == CTRL_TI_PI and active[fi] and mode[fi] == MODE_FFS:
                k_cs[stage][fi, 0] = -dfv / par[2] - par[4]
                k_cs[stage][fi, 1] = csv[fi][0] - dfv
            elif ct == CTRL_PI_PROTO and active[fi] and mode[fi] == MODE_FFS:
                ref = par[3] * (1.0 - exp(-tau / par[2]))
                k_cs[stage][fi, 0] = ref - dfv
            elif ct == CTRL_VIC_FIXED or ct == CTRL_VIC_ADAPTIVE:
                k_cs[stage][fi, 0] = (dfv - csv[fi][0]) / par[2]
            if p.mir_type[fi] >= 0:
                gov_deriv(p.mir_type[fi], p.mir_par[fi], msv[fi], dfv, k_ms[stage][fi])
            else:
                for i in range(N_GOV_STATES):
                    k_ms[stage][fi, i] = 0.0
            if record:
                out.p[k, fi] = pw
        pd_now = p.pd if dist_on else 0.0
        ddf = (dpm - pd_now + dpwf - p.d_f * dfv) / p.h2
        k_df[stage] = ddf
        if record:
            out.dpm[k] = dpm
            out.dpwf[k] = dpwf
            out.rocof[k] = ddf

    for k in range(p.n_steps + 1):
        t = k * dt
        dist_on = 1 if k >= p.dist_step else 0

        # --- discrete transitions at the step boundary --------------------
        for fi in range(n_farm):
            ct = p.ctrl_type[fi]
            if ct == CTRL_NONE:
                continue
            if not active[fi] and k >= p.ctrl_act_step[fi]:
                active[fi] = 1
                mode[fi] = MODE_FFS
                if ct == CTRL_TI_PI:
                    par = p.ctrl_par[fi]
                    win = (p.ctrl_act_step[fi] - p.dist_step) * dt
                    pd_hat = -par[3] * (df - out.df[p.dist_step]) / win
                    out.est_pd[fi] = pd_hat
                    par[4] = pd_hat / par[3]
                    cs[fi, 0] = df
                    cs[fi, 1] = 0.0
                if out.n_events < len(out.events):
                    out.events[out.n_events] = (k, fi, EV_ACTIVATE)
                    out.n_events += 1
            if mode[fi] == MODE_FFS:
                tau = t - p.dist_step * dt
                if ct == CTRL_SIC:
                    par = p.ctrl_par[fi]
                    if par[4] == 0.0 and k >= p.ctrl_act_step[fi] + int(par[1]):
                        par[4] = 1.0
                        if out.n_events < len(out.events):
                            out.events[out.n_events] = (k, fi, EV_SIC_WITHDRAW)
                            out.n_events += 1
                    if par[4] == 1.0:
                        lo = p.curve_off[fi]
                        hi = p.curve_off[fi + 1]
                        p_cmd = p.p0[fi] + par[2]
                        if (p_cmd <= curve_power(om[fi], p.curve_w, p.curve_p, lo, hi)
                                and om[fi] < p.omega0[fi]):
                            mode[fi] = MODE_EXIT
                            if out.n_events < len(out.events):
                                out.events[out.n_events] = (k, fi, EV_EXIT_MPPT)
                                out.n_events += 1
                elif ct in (CTRL_TI_PI, CTRL_PI_PROTO, CTRL_MODEL_BASED):
                    p_cmd = _farm_power(p, fi, MODE_FFS, active[fi], df, om[fi],
                                        cs[fi], ms[fi], tau)
                    lo = p.curve_off[fi]
                    hi = p.curve_off[fi + 1]
                    if (p_cmd <= curve_power(om[fi], p.curve_w, p.curve_p, lo, hi)
                            and om[fi] < p.omega0[fi]):
                        mode[fi] = MODE_EXIT
                        if out.n_events < len(out.events):
                            out.events[out.n_events] = (k, fi, EV_EXIT_MPPT)
                            out.n_events += 1
            if mode[fi] == MODE_FFS and om[fi] <= p.omega_min[fi]:
                mode[fi] = MODE_EXIT
                if out.n_events < len(out.events):
                    out.events[out.n_events] = (k, fi, EV_STALL)
                    out.n_events += 1

        # --- record row k (also evaluates stage-1 derivatives) ------------
        out.df[k] = df
        for fi in range(n_farm):
            out.omega[k, fi] = om[fi]
            out.mode[k, fi] = mode[fi]
        deriv(0, t, dist_on, df, gs, om, cs, ms, True, k)

        if not isfinite(df):
            out.status = STATUS_NAN
            out.err_step = k
            return
        if k == p.n_steps:
            break

        # --- RK4 step ------------------------------------------------------
        half = 0.5 * dt
        t_df = df + half * k_df[0]
        np.multiply(k_gs[0], half, out=t_gs); t_gs += gs
        np.multiply(k_om[0], half, out=t_om); t_om += om
        np.multiply(k_cs[0], half, out=t_cs); t_cs += cs
        np.multiply(k_ms[0], half, out=t_ms); t_ms += ms
        deriv(1, t + half, dist_on, t_df, t_gs, t_om, t_cs, t_ms, False, k)

        t_df = df + half * k_df[1]
        np.multiply(k_gs[1], half, out=t_gs); t_gs += gs
        np.multiply(k_om[1], half, out=t_om); t_om += om
        np.multiply(k_cs[1], half, out=t_cs); t_cs += cs
        np.multiply(k_ms[1], half, out=t_ms); t_ms += ms
        deriv(2, t + half, dist_on, t_df, t_gs, t_om, t_cs, t_ms, False, k)

        t_df = df + dt * k_df[2]
        np.multiply(k_gs[2], dt, out=t_gs); t_gs += gs
        np.multiply(k_om[2], dt, out=t_om); t_om += om
        np.multiply(k_cs[2], dt, out=t_cs); t_cs += cs
        np.multiply(k_ms[2], dt, out=t_ms); t_ms += ms
        deriv(3, t + dt, dist_on, t_df, t_gs, t_om, t_cs, t_ms, False, k)

        sixth = dt / 6.0
        df = df + sixth * (k_df[0] + 2.0 * k_df[1] + 2.0 * k_df[2] + k_df[3])
        gs += sixth * (k_gs[0] + 2.0 * k_gs[1] + 2.0 * k_gs[2] + k_gs[3])
        om += sixth * (k_om[0] + 2.0 * k_om[1] + 2.0 * k_om[2] + k_om[3])
        cs += sixth * (k_cs[0] + 2.0 * k_cs[1] + 2.0 * k_cs[2] + k_cs[3])
        ms += sixth * (k_ms[0] + 2.0 * k_ms[1] + 2.0 * k_ms[2] + k_ms[3])
        for gi in range(n_gov):
            gov_enforce_limits(p.gov_type[gi], p.gov_par[gi], gs[gi])
        for fi in range(n_farm):
            if p.mir_type[fi] >= 0:
                gov_enforce_limits(p.mir_type[fi], p.mir_par[fi], ms[fi])

    out.status = STATUS_OK

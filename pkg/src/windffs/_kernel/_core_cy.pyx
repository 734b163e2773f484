# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping kernel.

Arithmetic twin of ``_core_py``: the same operations in the same order, so
both backends produce identical trajectories.  Any change must be mirrored
in the pure-Python module.
"""

from libc.math cimport exp, pow, isfinite

import numpy as np

from ._plan import (
    CTRL_MODEL_BASED, CTRL_NONE, CTRL_PI_PROTO, CTRL_SIC, CTRL_TI_PI,
    CTRL_VIC_ADAPTIVE, CTRL_VIC_FIXED, EV_ACTIVATE, EV_EXIT_MPPT,
    EV_SIC_WITHDRAW, EV_STALL, STATUS_NAN, STATUS_OK,
)

name = "compiled"
compiled = True

DEF NGS = 6          # governor states
DEF NCS = 4          # controller states

cdef int C_GOV_SIMPLIFIED = 0
cdef int C_GOV_IEEEG1 = 1
cdef int C_GOV_IEEEG3 = 2

cdef int C_NONE = CTRL_NONE
cdef int C_TI_PI = CTRL_TI_PI
cdef int C_PI_PROTO = CTRL_PI_PROTO
cdef int C_MODEL_BASED = CTRL_MODEL_BASED
cdef int C_VIC_FIXED = CTRL_VIC_FIXED
cdef int C_VIC_ADAPTIVE = CTRL_VIC_ADAPTIVE
cdef int C_SIC = CTRL_SIC

cdef int M_MPPT = 0
cdef int M_FFS = 1
cdef int M_EXIT = 2

cdef long C_EV_ACTIVATE = EV_ACTIVATE
cdef long C_EV_EXIT_MPPT = EV_EXIT_MPPT
cdef long C_EV_STALL = EV_STALL
cdef long C_EV_SIC_WITHDRAW = EV_SIC_WITHDRAW
cdef long C_STATUS_OK = STATUS_OK
cdef long C_STATUS_NAN = STATUS_NAN


# ---------------------------------------------------------------------------
# governor dynamics
# ---------------------------------------------------------------------------

cdef double _gov_output(long gtype, const double* par, const double* s,
                        double df) noexcept nogil:
    cdef double prev, out, val, g, xw
    cdef int i
    if gtype == 0:      # simplified
        if par[0] > 0.0:
            return s[0]
        return -par[1] * df
    if gtype == 1:      # ieeeg1
        prev = s[1]
        out = 0.0
        for i in range(4):
            if par[3 + i] > 0.0:
                val = s[2 + i]
            else:
                val = prev
            out += par[7 + i] * val
            prev = val
        return out
    g = s[1]            # ieeeg3
    xw = s[3]
    return par[9] * g - (par[8] * par[7] / par[6]) * (g - xw)


cdef void _gov_deriv(long gtype, const double* par, const double* s,
                     double df, double* ds) noexcept nogil:
    cdef double tg, inv_r, t1, t3, uo, uc, pmin, pmax, x1, v, prev, ti
    cdef double sigma, rr, tg3, tp, tr, tw, a11, g, u, xp
    cdef int i
    for i in range(NGS):
        ds[i] = 0.0
    if gtype == 0:
        tg = par[0]
        if tg > 0.0:
            ds[0] = (-par[1] * df - s[0]) / tg
        return
    if gtype == 1:
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
        return
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


cdef void _gov_enforce_limits(long gtype, const double* par, double* s) noexcept nogil:
    if gtype == 1:
        if s[1] > par[14]:
            s[1] = par[14]
        elif s[1] < par[13]:
            s[1] = par[13]


def gov_output(gtype, par, s, df):
    """Single-governor output (used by the Python-level Governor wrapper)."""
    cdef double[::1] parv = np.ascontiguousarray(par, dtype=np.float64)
    cdef double[::1] sv = np.ascontiguousarray(s, dtype=np.float64)
    return _gov_output(gtype, &parv[0], &sv[0], df)


def gov_step(gtype, par, s, df, dt):
    """One RK4 step of a standalone governor with ``df`` held; returns output."""
    cdef double[::1] parv = np.ascontiguousarray(par, dtype=np.float64)
    cdef double[::1] sv = s
    cdef double k1[NGS]
    cdef double k2[NGS]
    cdef double k3[NGS]
    cdef double k4[NGS]
    cdef double tmp[NGS]
    cdef double cdt = dt
    cdef double cdf = df
    cdef long gt = gtype
    cdef int i
    _gov_deriv(gt, &parv[0], &sv[0], cdf, k1)
    for i in range(NGS):
        tmp[i] = sv[i] + 0.5 * cdt * k1[i]
    _gov_deriv(gt, &parv[0], tmp, cdf, k2)
    for i in range(NGS):
        tmp[i] = sv[i] + 0.5 * cdt * k2[i]
    _gov_deriv(gt, &parv[0], tmp, cdf, k3)
    for i in range(NGS):
        tmp[i] = sv[i] + cdt * k3[i]
    _gov_deriv(gt, &parv[0], tmp, cdf, k4)
    for i in range(NGS):
        sv[i] = sv[i] + cdt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    _gov_enforce_limits(gt, &parv[0], &sv[0])
    return _gov_output(gt, &parv[0], &sv[0], cdf)


# ---------------------------------------------------------------------------
# farm aerodynamics and tracking curve
# ---------------------------------------------------------------------------

cdef double _aero(double vw, double om, double aero_scale, double lam_scale,
                  const double* cp) noexcept nogil:
    cdef double lam, inv_li, val
    if vw <= 0.0:
        return 0.0
    lam = lam_scale * om / vw
    if lam <= 0.0:
        return 0.0
    inv_li = 1.0 / lam - cp[6]
    val = cp[0] * (cp[1] * inv_li - cp[3]) * exp(-cp[4] * inv_li) + cp[5] * lam
    if val < 0.0:
        val = 0.0
    return aero_scale * pow(vw, 3.0) * val


cdef double _curve_power(double om, const double* ws, const double* ps,
                         long lo, long hi) noexcept nogil:
    cdef long n = hi - lo
    cdef long j
    cdef double slope, val
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

cdef struct PlanC:
    long n_steps
    double dt
    double h2
    double d_f
    long dist_step
    double pd
    long n_gov
    long n_farm
    long* gov_type
    double* gov_par
    double* gov_scale
    long* gov_off_step
    long* ctrl_type
    double* ctrl_par
    long* ctrl_act_step
    double* br
    double* m_wt
    double* v_w
    double* omega0
    double* p0
    double* omega_min
    double* omega_max
    double* aero_scale
    double* lam_scale
    double* cp
    long* curve_off
    double* curve_w
    double* curve_p
    long* mir_type
    double* mir_par


cdef double _farm_power(PlanC* p, long f, long mode, long active, double df,
                        double om, const double* cs, const double* ms,
                        double tau) noexcept nogil:
    cdef long lo = p.curve_off[f]
    cdef long hi = p.curve_off[f + 1]
    cdef long ct = p.ctrl_type[f]
    cdef const double* par = p.ctrl_par + f * 6
    cdef double e, dp, pw, ref, dp_sys, rocof_est, mir_out, omx, pa
    if mode == M_FFS and active:
        if ct == C_TI_PI:
            e = cs[0] - df
            dp = par[0] * e + par[1] * cs[1]
            pw = p.p0[f] + dp
        elif ct == C_PI_PROTO:
            ref = par[3] * (1.0 - exp(-tau / par[2]))
            e = ref - df
            dp = par[0] * e + par[1] * cs[0]
            pw = p.p0[f] + dp
        elif ct == C_MODEL_BASED:
            mir_out = _gov_output(p.mir_type[f], p.mir_par + f * 16, ms, df)
            dp_sys = -mir_out - par[0] * df
            pw = p.p0[f] + dp_sys * par[1]
        elif ct == C_VIC_FIXED or ct == C_VIC_ADAPTIVE:
            rocof_est = (df - cs[0]) / par[2]
            dp = -par[0] * rocof_est - par[1] * df
            pw = p.p0[f] + dp
        elif ct == C_SIC:
            # staged: constant overproduction, then constant absorption
            pw = p.p0[f] + (par[0] if par[4] == 0.0 else par[2])
        else:
            pw = _curve_power(om, p.curve_w, p.curve_p, lo, hi)
        return pw if pw > 0.0 else 0.0
    omx = p.omega_max[f]
    if om >= omx:
        pw = _curve_power(omx, p.curve_w, p.curve_p, lo, hi)
        pa = _aero(p.v_w[f], om, p.aero_scale[f], p.lam_scale[f], p.cp + f * 7)
        if pa > pw:
            pw = pa
    else:
        pw = _curve_power(om, p.curve_w, p.curve_p, lo, hi)
    return pw if pw > 0.0 else 0.0


cdef void _deriv(PlanC* p, long stage, double t, long dist_on, double dfv,
                 const double* gsv, const double* omv, const double* csv,
                 const double* msv, const long* mode, const long* active,
                 double* kdf, double* kgs, double* kom, double* kcs,
                 double* kms, long record, long k,
                 double* out_p, double* out_dpm, double* out_dpwf,
                 double* out_rocof, long n_row) noexcept nogil:
    cdef double dpm = 0.0
    cdef double dpwf = 0.0
    cdef double tau, pw, pa, ddf, pd_now, ref
    cdef long gi, fi, i, ct, off
    cdef const double* par
    for gi in range(p.n_gov):
        off = p.gov_off_step[gi]
        if off >= 0 and k >= off:
            for i in range(NGS):
                kgs[stage * p.n_gov * NGS + gi * NGS + i] = 0.0
            continue
        _gov_deriv(p.gov_type[gi], p.gov_par + gi * 16, gsv + gi * NGS, dfv,
                   kgs + stage * p.n_gov * NGS + gi * NGS)
        dpm += _gov_output(p.gov_type[gi], p.gov_par + gi * 16, gsv + gi * NGS,
                           dfv) * p.gov_scale[gi]
    tau = t - p.dist_step * p.dt
    for fi in range(p.n_farm):
        pw = _farm_power(p, fi, mode[fi], active[fi], dfv, omv[fi],
                         csv + fi * NCS, msv + fi * NGS, tau)
        pa = _aero(p.v_w[fi], omv[fi], p.aero_scale[fi], p.lam_scale[fi],
                   p.cp + fi * 7)
        kom[stage * p.n_farm + fi] = (pa - pw) / (p.m_wt[fi] * omv[fi])
        dpwf += (pw - p.p0[fi]) * p.br[fi]
        ct = p.ctrl_type[fi]
        for i in range(NCS):
            kcs[stage * p.n_farm * NCS + fi * NCS + i] = 0.0
        par = p.ctrl_par + fi * 6
        if ct == C_TI_PI and active[fi] and mode[fi] == M_FFS:
            kcs[stage * p.n_farm * NCS + fi * NCS + 0] = -dfv / par[2] - par[4]
            kcs[stage * p.n_farm * NCS + fi * NCS + 1] = csv[fi * NCS + 0] - dfv
        elif ct == C_PI_PROTO and active[fi] and mode[fi] == M_FFS:
            ref = par[3] * (1.0 - exp(-tau / par[2]))
            kcs[stage * p.n_farm * NCS + fi * NCS + 0] = ref - dfv
        elif ct == C_VIC_FIXED or ct == C_VIC_ADAPTIVE:
            kcs[stage * p.n_farm * NCS + fi * NCS + 0] = (dfv - csv[fi * NCS + 0]) / par[2]
        if p.mir_type[fi] >= 0:
            _gov_deriv(p.mir_type[fi], p.mir_par + fi * 16, msv + fi * NGS, dfv,
                       kms + stage * p.n_farm * NGS + fi * NGS)
        else:
            for i in range(NGS):
                kms[stage * p.n_farm * NGS + fi * NGS + i] = 0.0
        if record:
            out_p[k * p.n_farm + fi] = pw
    pd_now = p.pd if dist_on else 0.0
    ddf = (dpm - pd_now + dpwf - p.d_f * dfv) / p.h2
    kdf[stage] = ddf
    if record:
        out_dpm[k] = dpm
        out_dpwf[k] = dpwf
        out_rocof[k] = ddf


def run_scenario(plan, out):
    cdef long[::1] gov_type = plan.gov_type
    cdef double[:, ::1] gov_par = plan.gov_par
    cdef double[::1] gov_scale = plan.gov_scale
    cdef long[::1] gov_off = plan.gov_off_step
    cdef long[::1] ctrl_type = plan.ctrl_type
    cdef double[:, ::1] ctrl_par = plan.ctrl_par
    cdef long[::1] ctrl_act = plan.ctrl_act_step
    cdef double[::1] br = plan.br
    cdef double[::1] m_wt = plan.m_wt
    cdef double[::1] v_w = plan.v_w
    cdef double[::1] omega0 = plan.omega0
    cdef double[::1] p0 = plan.p0
    cdef double[::1] omega_min = plan.omega_min
    cdef double[::1] omega_max = plan.omega_max
    cdef double[::1] aero_scale = plan.aero_scale
    cdef double[::1] lam_scale = plan.lam_scale
    cdef double[:, ::1] cp = plan.cp
    cdef long[::1] curve_off = plan.curve_off
    cdef double[::1] curve_w = plan.curve_w
    cdef double[::1] curve_p = plan.curve_p
    cdef long[::1] mir_type = plan.mir_type
    cdef double[:, ::1] mir_par = plan.mir_par

    cdef double[::1] out_df = out.df
    cdef double[::1] out_rocof = out.rocof
    cdef double[::1] out_dpm = out.dpm
    cdef double[::1] out_dpwf = out.dpwf
    cdef double[:, ::1] out_om = out.omega
    cdef double[:, ::1] out_pw = out.p
    cdef signed char[:, ::1] out_mode = out.mode
    cdef double[::1] out_est = out.est_pd
    cdef long[:, ::1] out_ev = out.events

    cdef PlanC p
    p.n_steps = plan.n_steps
    p.dt = plan.dt
    p.h2 = plan.h2
    p.d_f = plan.d_f
    p.dist_step = plan.dist_step
    p.pd = plan.pd
    p.n_gov = gov_type.shape[0]
    p.n_farm = ctrl_type.shape[0]
    p.gov_type = &gov_type[0] if p.n_gov else NULL
    p.gov_par = &gov_par[0, 0] if p.n_gov else NULL
    p.gov_scale = &gov_scale[0] if p.n_gov else NULL
    p.gov_off_step = &gov_off[0] if p.n_gov else NULL
    p.ctrl_type = &ctrl_type[0] if p.n_farm else NULL
    p.ctrl_par = &ctrl_par[0, 0] if p.n_farm else NULL
    p.ctrl_act_step = &ctrl_act[0] if p.n_farm else NULL
    p.br = &br[0] if p.n_farm else NULL
    p.m_wt = &m_wt[0] if p.n_farm else NULL
    p.v_w = &v_w[0] if p.n_farm else NULL
    p.omega0 = &omega0[0] if p.n_farm else NULL
    p.p0 = &p0[0] if p.n_farm else NULL
    p.omega_min = &omega_min[0] if p.n_farm else NULL
    p.omega_max = &omega_max[0] if p.n_farm else NULL
    p.aero_scale = &aero_scale[0] if p.n_farm else NULL
    p.lam_scale = &lam_scale[0] if p.n_farm else NULL
    p.cp = &cp[0, 0] if p.n_farm else NULL
    p.curve_off = &curve_off[0]
    p.curve_w = &curve_w[0] if curve_w.shape[0] else NULL
    p.curve_p = &curve_p[0] if curve_p.shape[0] else NULL
    p.mir_type = &mir_type[0] if p.n_farm else NULL
    p.mir_par = &mir_par[0, 0] if p.n_farm else NULL

    cdef long n_gov = p.n_gov
    cdef long n_farm = p.n_farm
    cdef double dt = p.dt

    # states
    df_state = np.zeros(1)
    gs_a = np.zeros(n_gov * NGS)
    om_a = plan.omega0.copy()
    cs_a = np.zeros(n_farm * NCS)
    ms_a = np.zeros(n_farm * NGS)
    mode_a = np.zeros(n_farm, dtype=np.int64)
    active_a = np.zeros(n_farm, dtype=np.int64)
    kdf_a = np.zeros(4)
    kgs_a = np.zeros(4 * max(n_gov, 1) * NGS)
    kom_a = np.zeros(4 * max(n_farm, 1))
    kcs_a = np.zeros(4 * max(n_farm, 1) * NCS)
    kms_a = np.zeros(4 * max(n_farm, 1) * NGS)
    tgs_a = np.zeros(max(n_gov, 1) * NGS)
    tom_a = np.zeros(max(n_farm, 1))
    tcs_a = np.zeros(max(n_farm, 1) * NCS)
    tms_a = np.zeros(max(n_farm, 1) * NGS)

    cdef double[::1] gs = gs_a
    cdef double[::1] om = om_a
    cdef double[::1] cs = cs_a
    cdef double[::1] ms = ms_a
    cdef long[::1] mode = mode_a
    cdef long[::1] active = active_a
    cdef double[::1] kdf = kdf_a
    cdef double[::1] kgs = kgs_a
    cdef double[::1] kom = kom_a
    cdef double[::1] kcs = kcs_a
    cdef double[::1] kms = kms_a
    cdef double[::1] tgs = tgs_a
    cdef double[::1] tom = tom_a
    cdef double[::1] tcs = tcs_a
    cdef double[::1] tms = tms_a

    cdef double df = 0.0
    cdef double t, half, sixth, t_df, win, pd_hat, p_cmd, tau
    cdef long k, fi, i, ct, dist_on, n_ev = 0, max_ev = out_ev.shape[0]
    cdef long status = C_STATUS_OK, err_step = -1
    cdef long lo, hi

    with nogil:
        for k in range(p.n_steps + 1):
            t = k * dt
            dist_on = 1 if k >= p.dist_step else 0

            # --- discrete transitions at the step boundary ----------------
            for fi in range(n_farm):
                ct = p.ctrl_type[fi]
                if ct == C_NONE:
                    continue
                if not active[fi] and k >= p.ctrl_act_step[fi]:
                    active[fi] = 1
                    mode[fi] = M_FFS
                    if ct == C_TI_PI:
                        win = (p.ctrl_act_step[fi] - p.dist_step) * dt
                        pd_hat = -p.ctrl_par[fi * 6 + 3] * (df - out_df[p.dist_step]) / win
                        out_est[fi] = pd_hat
                        p.ctrl_par[fi * 6 + 4] = pd_hat / p.ctrl_par[fi * 6 + 3]
                        cs[fi * NCS + 0] = df
                        cs[fi * NCS + 1] = 0.0
                    if n_ev < max_ev:
                        out_ev[n_ev, 0] = k
                        out_ev[n_ev, 1] = fi
                        out_ev[n_ev, 2] = C_EV_ACTIVATE
                        n_ev += 1
                if mode[fi] == M_FFS:
                    tau = t - p.dist_step * dt
                    if ct == C_SIC:
                        if (p.ctrl_par[fi * 6 + 4] == 0.0
                                and k >= p.ctrl_act_step[fi] + <long>p.ctrl_par[fi * 6 + 1]):
                            p.ctrl_par[fi * 6 + 4] = 1.0
                            if n_ev < max_ev:
                                out_ev[n_ev, 0] = k
                                out_ev[n_ev, 1] = fi
                                out_ev[n_ev, 2] = C_EV_SIC_WITHDRAW
                                n_ev += 1
                        if p.ctrl_par[fi * 6 + 4] == 1.0:
                            lo = p.curve_off[fi]
                            hi = p.curve_off[fi + 1]
                            p_cmd = p.p0[fi] + p.ctrl_par[fi * 6 + 2]
                            if (p_cmd <= _curve_power(om[fi], p.curve_w, p.curve_p, lo, hi)
                                    and om[fi] < p.omega0[fi]):
                                mode[fi] = M_EXIT
                                if n_ev < max_ev:
                                    out_ev[n_ev, 0] = k
                                    out_ev[n_ev, 1] = fi
                                    out_ev[n_ev, 2] = C_EV_EXIT_MPPT
                                    n_ev += 1
                    elif ct == C_TI_PI or ct == C_PI_PROTO or ct == C_MODEL_BASED:
                        p_cmd = _farm_power(&p, fi, M_FFS, active[fi], df, om[fi],
                                            &cs[fi * NCS], &ms[fi * NGS], tau)
                        lo = p.curve_off[fi]
                        hi = p.curve_off[fi + 1]
                        if (p_cmd <= _curve_power(om[fi], p.curve_w, p.curve_p, lo, hi)
                                and om[fi] < p.omega0[fi]):
                            mode[fi] = M_EXIT
                            if n_ev < max_ev:
                                out_ev[n_ev, 0] = k
                                out_ev[n_ev, 1] = fi
                                out_ev[n_ev, 2] = C_EV_EXIT_MPPT
                                n_ev += 1
                if mode[fi] == M_FFS and om[fi] <= p.omega_min[fi]:
                    mode[fi] = M_EXIT
                    if n_ev < max_ev:
                        out_ev[n_ev, 0] = k
                        out_ev[n_ev, 1] = fi
                        out_ev[n_ev, 2] = C_EV_STALL
                        n_ev += 1

            # --- record row k ---------------------------------------------
            out_df[k] = df
            for fi in range(n_farm):
                out_om[k, fi] = om[fi]
                out_mode[k, fi] = <signed char>mode[fi]
            _deriv(&p, 0, t, dist_on, df, &gs[0] if n_gov else NULL, &om[0] if n_farm else NULL,
                   &cs[0] if n_farm else NULL, &ms[0] if n_farm else NULL,
                   &mode[0] if n_farm else NULL, &active[0] if n_farm else NULL,
                   &kdf[0], &kgs[0], &kom[0], &kcs[0], &kms[0], 1, k,
                   &out_pw[0, 0] if n_farm else NULL, &out_dpm[0], &out_dpwf[0],
                   &out_rocof[0], p.n_steps + 1)

            if not isfinite(df):
                status = C_STATUS_NAN
                err_step = k
                break
            if k == p.n_steps:
                break

            # --- RK4 step ---------------------------------------------------
            half = 0.5 * dt
            t_df = df + half * kdf[0]
            for i in range(n_gov * NGS):
                tgs[i] = kgs[0 * n_gov * NGS + i] * half + gs[i]
            for i in range(n_farm):
                tom[i] = kom[0 * n_farm + i] * half + om[i]
            for i in range(n_farm * NCS):
                tcs[i] = kcs[0 * n_farm * NCS + i] * half + cs[i]
            for i in range(n_farm * NGS):
                tms[i] = kms[0 * n_farm * NGS + i] * half + ms[i]
            _deriv(&p, 1, t + half, dist_on, t_df, &tgs[0] if n_gov else NULL,
                   &tom[0] if n_farm else NULL, &tcs[0] if n_farm else NULL,
                   &tms[0] if n_farm else NULL, &mode[0] if n_farm else NULL,
                   &active[0] if n_farm else NULL,
                   &kdf[0], &kgs[0], &kom[0], &kcs[0], &kms[0], 0, k,
                   NULL, NULL, NULL, NULL, 0)

            t_df = df + half * kdf[1]
            for i in range(n_gov * NGS):
                tgs[i] = kgs[1 * n_gov * NGS + i] * half + gs[i]
            for i in range(n_farm):
                tom[i] = kom[1 * n_farm + i] * half + om[i]
            for i in range(n_farm * NCS):
                tcs[i] = kcs[1 * n_farm * NCS + i] * half + cs[i]
            for i in range(n_farm * NGS):
                tms[i] = kms[1 * n_farm * NGS + i] * half + ms[i]
            _deriv(&p, 2, t + half, dist_on, t_df, &tgs[0] if n_gov else NULL,
                   &tom[0] if n_farm else NULL, &tcs[0] if n_farm else NULL,
                   &tms[0] if n_farm else NULL, &mode[0] if n_farm else NULL,
                   &active[0] if n_farm else NULL,
                   &kdf[0], &kgs[0], &kom[0], &kcs[0], &kms[0], 0, k,
                   NULL, NULL, NULL, NULL, 0)

            t_df = df + dt * kdf[2]
            for i in range(n_gov * NGS):
                tgs[i] = kgs[2 * n_gov * NGS + i] * dt + gs[i]
            for i in range(n_farm):
                tom[i] = kom[2 * n_farm + i] * dt + om[i]
            for i in range(n_farm * NCS):
                tcs[i] = kcs[2 * n_farm * NCS + i] * dt + cs[i]
            for i in range(n_farm * NGS):
                tms[i] = kms[2 * n_farm * NGS + i] * dt + ms[i]
            _deriv(&p, 3, t + dt, dist_on, t_df, &tgs[0] if n_gov else NULL,
                   &tom[0] if n_farm else NULL, &tcs[0] if n_farm else NULL,
                   &tms[0] if n_farm else NULL, &mode[0] if n_farm else NULL,
                   &active[0] if n_farm else NULL,
                   &kdf[0], &kgs[0], &kom[0], &kcs[0], &kms[0], 0, k,
                   NULL, NULL, NULL, NULL, 0)

            sixth = dt / 6.0
            df = df + sixth * (kdf[0] + 2.0 * kdf[1] + 2.0 * kdf[2] + kdf[3])
            for i in range(n_gov * NGS):
                gs[i] = gs[i] + sixth * (kgs[0 * n_gov * NGS + i]
                                         + 2.0 * kgs[1 * n_gov * NGS + i]
                                         + 2.0 * kgs[2 * n_gov * NGS + i]
                                         + kgs[3 * n_gov * NGS + i])
            for i in range(n_farm):
                om[i] = om[i] + sixth * (kom[0 * n_farm + i]
                                         + 2.0 * kom[1 * n_farm + i]
                                         + 2.0 * kom[2 * n_farm + i]
                                         + kom[3 * n_farm + i])
            for i in range(n_farm * NCS):
                cs[i] = cs[i] + sixth * (kcs[0 * n_farm * NCS + i]
                                         + 2.0 * kcs[1 * n_farm * NCS + i]
                                         + 2.0 * kcs[2 * n_farm * NCS + i]
                                         + kcs[3 * n_farm * NCS + i])
            for i in range(n_farm * NGS):
                ms[i] = ms[i] + sixth * (kms[0 * n_farm * NGS + i]
                                         + 2.0 * kms[1 * n_farm * NGS + i]
                                         + 2.0 * kms[2 * n_farm * NGS + i]
                                         + kms[3 * n_farm * NGS + i])
            for fi in range(n_gov):
                _gov_enforce_limits(p.gov_type[fi], p.gov_par + fi * 16, &gs[fi * NGS])
            for fi in range(n_farm):
                if p.mir_type[fi] >= 0:
                    _gov_enforce_limits(p.mir_type[fi], p.mir_par + fi * 16, &ms[fi * NGS])

    out.n_events = n_ev
    out.status = status
    out.err_step = err_step

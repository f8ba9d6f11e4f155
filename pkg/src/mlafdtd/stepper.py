"""Single-step three-level time advance at orders 2 and 4.

Order 2 advances P with the damped-oscillator recurrence, E with the
standard three-level wave update, and N with a two-term Taylor series
whose time derivatives come from the rate equation evaluated with
centered differences of the freshly updated P and E.

Order 4 is a hierarchical predictor-corrector: a second-order starred
pass supplies difference approximations of third and fourth time
derivatives of P (and of N's first two), which enter as modified-equation
corrections in the final P, E, and N updates.  A recurrence on the
Laplacian of P supplies the Lap(P_tt) correction for E without widening
the P stencil in time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FieldState
from .materials import MaterialParams
from .stencils import lap2, lap4, lap_product_chain, lap_sq2


@dataclass
class ForcingSample:
    """Forcing arrays for one time level on the full (ghosted) grid.

    Unused entries stay zero; order-2 stepping reads only fe, fp, fn, fnt.
    Gradient entries fex/fey are needed only by interface residuals.
    """

    fe: np.ndarray
    fet: np.ndarray
    fett: np.ndarray
    lapfe: np.ndarray
    fp: np.ndarray
    fpt: np.ndarray
    fptt: np.ndarray
    lapfp: np.ndarray
    fn: np.ndarray
    fnt: np.ndarray
    fntt: np.ndarray
    fnttt: np.ndarray
    fex: np.ndarray | None = None
    fey: np.ndarray | None = None

    @classmethod
    def zeros(cls, num_p: int, num_n: int, d: int, shape: tuple,
              gradients: bool = False) -> "ForcingSample":
        e = lambda: np.zeros((d,) + shape)
        p = lambda: np.zeros((num_p, d) + shape)
        n = lambda: np.zeros((num_n,) + shape)
        return cls(fe=e(), fet=e(), fett=e(), lapfe=e(),
                   fp=p(), fpt=p(), fptt=p(), lapfp=p(),
                   fn=n(), fnt=n(), fntt=n(), fnttt=n(),
                   fex=e() if gradients else None,
                   fey=e() if gradients else None)


def zero_forcing(material: MaterialParams, d: int, shape: tuple) -> ForcingSample:
    return ForcingSample.zeros(material.num_polarization,
                               material.num_levels, d, shape)


def _edot(e, p_like):
    """sum_c E_c * X_{m,c} for X with leading polarization axis."""
    return np.einsum("c...,mc...->m...", e, p_like)


def n_derivs_order2(mat: MaterialParams, e_n, d0t_e, n_lvl, d0t_p, dpdm_p,
                    fn, fnt):
    """First and second N time derivatives from the rate equation:

        qt_l  = fn_l  + sum_k alpha[l,k] N_k + sum_m beta[l,m] E . D0t P_m
        qtt_l = fnt_l + sum_k alpha[l,k] qt_k
                + sum_m beta[l,m] (D0t E . D0t P_m + E . D+D- P_m)
    """
    beta = mat.beta
    qt = fn + np.einsum("lk,k...->l...", mat.alpha, n_lvl) \
        + np.einsum("lm,m...->l...", beta, _edot(e_n, d0t_p))
    qtt = fnt + np.einsum("lk,k...->l...", mat.alpha, qt) \
        + np.einsum("lm,m...->l...", beta,
                    _edot(d0t_e, d0t_p) + _edot(e_n, dpdm_p))
    return qt, qtt


def p_ladder_starred(mat: MaterialParams, e_n, n_lvl, d0t_p, dpdm_p, qt, qtt,
                     d0t_e, dpdm_e, fpt, fptt):
    """Second-order-accurate third/fourth P time derivatives:

        P_ttt  = -b1 D+D-P - b0 D0tP + sum_l a (qt_l E + N_l D0tE) + fpt
        P_tttt = -b1 P_ttt - b0 D+D-P
                 + sum_l a (qtt_l E + 2 qt_l D0tE + N_l D+D-E) + fptt
    """
    a = mat.a
    b0 = mat.b0.reshape((-1,) + (1,) * (d0t_p.ndim - 1))
    b1 = mat.b1.reshape(b0.shape)
    qt_e = np.einsum("ml,l...,c...->mc...", a, qt, e_n)
    n_d0te = np.einsum("ml,l...,c...->mc...", a, n_lvl, d0t_e)
    pttt = -b1 * dpdm_p - b0 * d0t_p + qt_e + n_d0te + fpt
    qtt_e = np.einsum("ml,l...,c...->mc...", a, qtt, e_n)
    qt_d0te = np.einsum("ml,l...,c...->mc...", a, qt, d0t_e)
    n_dpdme = np.einsum("ml,l...,c...->mc...", a, n_lvl, dpdm_e)
    ptttt = -b1 * pttt - b0 * dpdm_p + qtt_e + 2.0 * qt_d0te + n_dpdme + fptt
    return pttt, ptttt


def _p_update_order2(mat: MaterialParams, dt: float, p_n, p_nm, n_lvl, e_n, fp):
    """Damped-oscillator recurrence for P^{n+1} (beta_m prefactor applied)."""
    dtsq = dt * dt
    b0 = mat.b0.reshape((-1,) + (1,) * (p_n.ndim - 1))
    b1 = mat.b1.reshape(b0.shape)
    betav = 1.0 / (1.0 + 0.5 * dt * mat.b1)
    ne = np.einsum("ml,l...,c...->mc...", mat.a, n_lvl, e_n)
    rhs = (2.0 * p_n - p_nm + 0.5 * dt * b1 * p_nm - dtsq * b0 * p_n
           + dtsq * ne + dtsq * fp)
    return betav.reshape(b0.shape) * rhs


def _interior(grid, lead: int) -> tuple:
    """Interior-assignment slices; ghost entries are never written."""
    return (slice(None),) * lead + grid.interior


def step_order2(state: FieldState, dt: float,
                forcing: ForcingSample | None = None) -> FieldState:
    """One second-order step; writes the interior (n+1) slots, no rotation."""
    mat, grid = state.material, state.grid
    if forcing is None:
        forcing = zero_forcing(mat, state.ncomp, grid.shape)
    dtsq = dt * dt
    e_nm, e_n, e_np = state.E
    p_nm, p_n, p_np = state.P
    n_lvl = state.N[0]
    ie = _interior(grid, 1)
    ip = _interior(grid, 2)

    p_new = _p_update_order2(mat, dt, p_n, p_nm, n_lvl, e_n, forcing.fp)
    p_np[ip] = p_new[ip]
    p_sum = np.sum(p_new - 2.0 * p_n + p_nm, axis=0)
    e_new = (2.0 * e_n - e_nm + mat.c**2 * dtsq * lap2(e_n, grid)
             - mat.alpha_p * p_sum + dtsq * forcing.fe)
    e_np[ie] = e_new[ie]

    d0t_p = (p_new - p_nm) / (2.0 * dt)
    dpdm_p = (p_new - 2.0 * p_n + p_nm) / dtsq
    d0t_e = (e_new - e_nm) / (2.0 * dt)
    qt, qtt = n_derivs_order2(mat, e_n, d0t_e, n_lvl, d0t_p, dpdm_p,
                              forcing.fn, forcing.fnt)
    n_new = n_lvl + dt * qt + 0.5 * dtsq * qtt
    state.N[1][ie] = n_new[ie]
    return state


def step_order4(state: FieldState, dt: float,
                forcing: ForcingSample | None = None) -> FieldState:
    """One fourth-order hierarchical step; writes (n+1) slots, no rotation."""
    mat, grid = state.material, state.grid
    if forcing is None:
        forcing = zero_forcing(mat, state.ncomp, grid.shape)
    dtsq = dt * dt
    csq = mat.c**2
    ap = mat.alpha_p
    e_nm, e_n, e_np = state.E
    p_nm, p_n, p_np = state.P
    n_lvl = state.N[0]
    b0 = mat.b0.reshape((-1, 1) + (1,) * grid.dim)
    b1 = mat.b1.reshape(b0.shape)
    betav = 1.0 / (1.0 + 0.5 * dt * mat.b1)
    betav_b = betav.reshape(b0.shape)

    # spatial derivatives at level n (and the n-1 Laplacian for E_ttt)
    elap4 = lap4(e_n, grid)
    elapsq2 = lap_sq2(e_n, grid)
    elap2 = lap2(e_n, grid)
    elap2m = lap2(e_nm, grid)
    pxx = lap4(p_n, grid)
    pxxm = lap4(p_nm, grid)
    # chain rule Lap(N_l E_c), second order
    qelap = np.stack([lap_product_chain(e_n, n_lvl[loft], grid)
                      for loft in range(mat.num_levels)])

    ie = _interior(grid, 1)
    ip = _interior(grid, 2)

    # (i) starred second-order predictor (stored in the n+1 interior slots,
    # overwritten by the corrected values below)
    p_star = _p_update_order2(mat, dt, p_n, p_nm, n_lvl, e_n, forcing.fp)
    p_np[ip] = p_star[ip]
    p_sum_star = np.sum(p_star - 2.0 * p_n + p_nm, axis=0)
    e_star = (2.0 * e_n - e_nm + csq * dtsq * elap2
              - ap * p_sum_star + dtsq * forcing.fe)
    e_np[ie] = e_star[ie]

    # (ii) starred N derivatives
    d0t_p = (p_star - p_nm) / (2.0 * dt)
    dpdm_p = (p_star - 2.0 * p_n + p_nm) / dtsq
    d0t_e = (e_star - e_nm) / (2.0 * dt)
    dpdm_e = (e_star - 2.0 * e_n + e_nm) / dtsq
    qt_s, qtt_s = n_derivs_order2(mat, e_n, d0t_e, n_lvl, d0t_p, dpdm_p,
                                  forcing.fn, forcing.fnt)

    # (iii) starred P ladders
    pttt_s, ptttt_s = p_ladder_starred(mat, e_n, n_lvl, d0t_p, dpdm_p,
                                       qt_s, qtt_s, d0t_e, dpdm_e,
                                       forcing.fpt, forcing.fptt)
    pttt_sum = np.sum(pttt_s, axis=0)

    # (iv) corrected P
    ne = np.einsum("ml,l...,c...->mc...", mat.a, n_lvl, e_n)
    p_new = betav_b * (2.0 * p_n - p_nm + 0.5 * dt * b1 * p_nm
                       + dt**4 / 12.0 * ptttt_s
                       + dt**4 / 6.0 * b1 * pttt_s
                       - dtsq * b0 * p_n + dtsq * ne + dtsq * forcing.fp)
    p_np[ip] = p_new[ip]
    p_sum = np.sum(p_new - 2.0 * p_n + p_nm, axis=0)

    # (v) recurrence on Lap(P); drives the Lap(P_tt) correction in E
    ne_lap = np.einsum("ml,lc...->mc...", mat.a, qelap)
    pxx_np = betav_b * (2.0 * pxx - pxxm + 0.5 * dt * b1 * pxxm
                        - dtsq * b0 * pxx + dtsq * ne_lap
                        + dtsq * forcing.lapfp)
    pxx_sum = np.sum(pxx_np - 2.0 * pxx + pxxm, axis=0)

    # (vi) corrected E with modified-equation terms
    e_new = (2.0 * e_n - e_nm + csq * dtsq * elap4 - ap * p_sum
             + dtsq * forcing.fe
             + dt**4 / 12.0 * (csq**2 * elapsq2 - ap * csq * pxx_sum / dtsq
                               + csq * forcing.lapfe + forcing.fett))
    e_np[ie] = e_new[ie]

    # (vii) E_ttt via the Lap(E) recurrence
    elap2n = (2.0 * elap2 - elap2m + dtsq * csq * elapsq2 - ap * pxx_sum
              + dtsq * forcing.lapfe)
    ettt = (csq * elap2n - csq * elap2m) / (2.0 * dt) - ap * pttt_sum \
        + forcing.fet

    # (viii) fourth-order-accurate first derivatives
    ettv = (e_new - 2.0 * e_n + e_nm) / dtsq
    etv = (e_new - e_nm) / (2.0 * dt) - dtsq / 6.0 * ettt
    ptv = (p_new - p_nm) / (2.0 * dt) - dtsq / 6.0 * pttt_s
    pttv = -b1 * ptv - b0 * p_n + ne + forcing.fp

    # (ix) refreshed ladders with fourth-order-quality inputs (starred N
    # derivatives are retained here, matching the reference sequencing)
    qt_e = np.einsum("ml,l...,c...->mc...", mat.a, qt_s, e_n)
    n_etv = np.einsum("ml,l...,c...->mc...", mat.a, n_lvl, etv)
    pttt = -b1 * pttv - b0 * ptv + qt_e + n_etv + forcing.fpt
    qtt_e = np.einsum("ml,l...,c...->mc...", mat.a, qtt_s, e_n)
    qt_etv = np.einsum("ml,l...,c...->mc...", mat.a, qt_s, etv)
    n_ettv = np.einsum("ml,l...,c...->mc...", mat.a, n_lvl, ettv)
    ptttt = -b1 * pttt - b0 * pttv + qtt_e + 2.0 * qt_etv + n_ettv \
        + forcing.fptt

    # (x) fourth-order N ladder and update
    alpha = mat.alpha
    beta = mat.beta
    qt = forcing.fn + np.einsum("lk,k...->l...", alpha, n_lvl) \
        + np.einsum("lm,m...->l...", beta, _edot(e_n, ptv))
    qtt = forcing.fnt + np.einsum("lk,k...->l...", alpha, qt) \
        + np.einsum("lm,m...->l...", beta,
                    _edot(etv, ptv) + _edot(e_n, pttv))
    qttt = forcing.fntt + np.einsum("lk,k...->l...", alpha, qtt) \
        + np.einsum("lm,m...->l...", beta,
                    _edot(ettv, ptv) + 2.0 * _edot(etv, pttv)
                    + _edot(e_n, pttt))
    qtttt = forcing.fnttt + np.einsum("lk,k...->l...", alpha, qttt) \
        + np.einsum("lm,m...->l...", beta,
                    _edot(ettt, ptv) + 3.0 * _edot(ettv, pttv)
                    + 3.0 * _edot(etv, pttt) + _edot(e_n, ptttt))
    n_new = (n_lvl + dt * qt + dtsq / 2.0 * qtt
             + dt**3 / 6.0 * qttt + dt**4 / 24.0 * qtttt)
    state.N[1][ie] = n_new[ie]
    return state


def step(state: FieldState, dt: float, order: int,
         forcing: ForcingSample | None = None) -> FieldState:
    if order == 2:
        return step_order2(state, dt, forcing)
    return step_order4(state, dt, forcing)

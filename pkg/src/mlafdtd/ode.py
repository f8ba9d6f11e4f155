"""Zero-dimensional P/N integration under a prescribed electric field.

Runs the polarization/population part of the time steppers at a single
point with all spatial terms absent and the three E time levels supplied
exactly by a user function.  Used for energy-conservation studies of the
restricted system and as a driver-independent view of the atomic update.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .materials import MaterialParams
from .stepper import n_derivs_order2, p_ladder_starred


def cosine_field(amp: float, omega: float, phase: float = 0.0, d: int = 1):
    """E(t) = amp*cos(omega t + phase) in every component, with derivatives."""

    def e_of_t(t: float, k: int = 0) -> np.ndarray:
        val = amp * omega**k * np.cos(omega * t + phase + k * 0.5 * np.pi)
        return np.full(d, val)

    return e_of_t


def _ode_derivs(mat: MaterialParams, e_of_t, t, p, pt, n):
    """(ptt, pttt, ptttt, nt, ntt) from the governing ODEs at time t."""
    e0, e1, e2 = e_of_t(t, 0), e_of_t(t, 1), e_of_t(t, 2)
    b0 = mat.b0[:, None]
    b1 = mat.b1[:, None]
    ane = lambda lvl, e: np.einsum("ml,l,c->mc", mat.a, lvl, e)
    ptt = -b1 * pt - b0 * p + ane(n, e0)
    nt = mat.alpha @ n + mat.beta @ np.einsum("c,mc->m", e0, pt)
    pttt = -b1 * ptt - b0 * pt + ane(nt, e0) + ane(n, e1)
    ntt = mat.alpha @ nt + mat.beta @ (np.einsum("c,mc->m", e1, pt)
                                       + np.einsum("c,mc->m", e0, ptt))
    ptttt = -b1 * pttt - b0 * ptt + ane(ntt, e0) + 2.0 * ane(nt, e1) \
        + ane(n, e2)
    return ptt, pttt, ptttt, nt, ntt


def taylor_previous_p(mat: MaterialParams, e_of_t, p0, pt0, n0,
                      dt: float) -> np.ndarray:
    """P(-dt) via a five-term Taylor series with ODE-derived derivatives."""
    ptt, pttt, ptttt, _, _ = _ode_derivs(mat, e_of_t, 0.0, p0, pt0, n0)
    return (p0 - dt * pt0 + dt**2 / 2.0 * ptt - dt**3 / 6.0 * pttt
            + dt**4 / 24.0 * ptttt)


@dataclass
class PointHistory:
    """Trajectory of the restricted system at one point.

    pt holds the derivative estimate the scheme itself would use for
    diagnostics: centered at order 2, deferred-corrected at order 4.
    The histories cover the levels that have a complete centered stencil,
    i.e. times 0 .. (steps-1)*dt.
    """

    times: np.ndarray
    p: np.ndarray        # (steps, num_p, d)
    pt: np.ndarray
    n: np.ndarray        # (steps, num_n)


def advance_prescribed_e(mat: MaterialParams, e_of_t: Callable,
                         p0, pt0, n0, dt: float, steps: int,
                         order: int) -> PointHistory:
    """March P and N with E levels taken exactly from e_of_t."""
    p_nm = taylor_previous_p(mat, e_of_t, np.asarray(p0, float),
                             np.asarray(pt0, float), np.asarray(n0, float),
                             dt)
    p_n = np.array(p0, dtype=float)
    n_lvl = np.array(n0, dtype=float)
    b0 = mat.b0[:, None]
    b1 = mat.b1[:, None]
    betav = (1.0 / (1.0 + 0.5 * dt * mat.b1))[:, None]
    dtsq = dt * dt

    times, hist_p, hist_pt, hist_n = [], [], [], []
    zero_p = np.zeros_like(p_n)
    zero_n = np.zeros_like(n_lvl)
    t = 0.0
    for _ in range(steps):
        e_nm, e_n, e_np = e_of_t(t - dt), e_of_t(t), e_of_t(t + dt)
        ne = np.einsum("ml,l,c->mc", mat.a, n_lvl, e_n)
        p_star = betav * (2.0 * p_n - p_nm + 0.5 * dt * b1 * p_nm
                          - dtsq * b0 * p_n + dtsq * ne)
        d0t_e = (e_np - e_nm) / (2.0 * dt)
        dpdm_e = (e_np - 2.0 * e_n + e_nm) / dtsq
        d0t_p = (p_star - p_nm) / (2.0 * dt)
        dpdm_p = (p_star - 2.0 * p_n + p_nm) / dtsq
        qt_s, qtt_s = n_derivs_order2(mat, e_n, d0t_e, n_lvl, d0t_p, dpdm_p,
                                      zero_n, zero_n)
        if order == 2:
            p_np = p_star
            n_np = n_lvl + dt * qt_s + 0.5 * dtsq * qtt_s
            ptv = d0t_p
        else:
            pttt_s, ptttt_s = p_ladder_starred(
                mat, e_n, n_lvl, d0t_p, dpdm_p, qt_s, qtt_s, d0t_e, dpdm_e,
                zero_p, zero_p)
            p_np = betav * (2.0 * p_n - p_nm + 0.5 * dt * b1 * p_nm
                            + dt**4 / 12.0 * ptttt_s
                            + dt**4 / 6.0 * b1 * pttt_s
                            - dtsq * b0 * p_n + dtsq * ne)
            ettt = e_of_t(t, 3)
            etv = d0t_e - dtsq / 6.0 * ettt
            ettv = dpdm_e
            ptv = (p_np - p_nm) / (2.0 * dt) - dtsq / 6.0 * pttt_s
            pttv = -b1 * ptv - b0 * p_n + ne
            qt_e = np.einsum("ml,l,c->mc", mat.a, qt_s, e_n)
            n_etv = np.einsum("ml,l,c->mc", mat.a, n_lvl, etv)
            pttt = -b1 * pttv - b0 * ptv + qt_e + n_etv
            qtt_e = np.einsum("ml,l,c->mc", mat.a, qtt_s, e_n)
            qt_etv = np.einsum("ml,l,c->mc", mat.a, qt_s, etv)
            n_ettv = np.einsum("ml,l,c->mc", mat.a, n_lvl, ettv)
            ptttt = -b1 * pttt - b0 * pttv + qtt_e + 2.0 * qt_etv + n_ettv
            dot = lambda e, pl: np.einsum("c,mc->m", e, pl)
            qt = mat.alpha @ n_lvl + mat.beta @ dot(e_n, ptv)
            qtt = mat.alpha @ qt + mat.beta @ (dot(etv, ptv) + dot(e_n, pttv))
            qttt = mat.alpha @ qtt + mat.beta @ (
                dot(ettv, ptv) + 2.0 * dot(etv, pttv) + dot(e_n, pttt))
            qtttt = mat.alpha @ qttt + mat.beta @ (
                dot(ettt, ptv) + 3.0 * dot(ettv, pttv)
                + 3.0 * dot(etv, pttt) + dot(e_n, ptttt))
            n_np = (n_lvl + dt * qt + dtsq / 2.0 * qtt
                    + dt**3 / 6.0 * qttt + dt**4 / 24.0 * qtttt)
        times.append(t)
        hist_p.append(p_n.copy())
        hist_pt.append(np.asarray(ptv).copy())
        hist_n.append(n_lvl.copy())
        p_nm, p_n = p_n, p_np
        n_lvl = n_np
        t += dt
    return PointHistory(times=np.asarray(times), p=np.asarray(hist_p),
                        pt=np.asarray(hist_pt), n=np.asarray(hist_n))


def energy_pn_point(mat: MaterialParams, pairing, p, pt, n) -> float:
    """E_PN at a single point (no quadrature weights needed in 0D)."""
    total = 0.0
    for m, tr in enumerate(pairing.transitions):
        total += pairing.delta[m] * 0.5 * (
            float(np.sum(pt[m] ** 2)) + tr.omega**2 * float(np.sum(p[m] ** 2)))
    total += 0.5 * pairing.K * float(np.sum(n**2))
    return total

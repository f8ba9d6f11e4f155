"""Acceptance suite: every primary criterion at its stated tolerance.

Each test prints one CRITERION line.  Run with `pytest -v -s
tests/test_acceptance.py` to see them; the whole module is sized for a
laptop (a few minutes).  The plotting criterion is exercised by the
frontend package's own test suite against artifacts this module writes
to tests/_acceptance_out/.
"""

import json
import math
import os
import time

import numpy as np
import pytest

from mlafdtd.core import DomainConfig, SimulationConfig
from mlafdtd.diagnostics import (EnergyPairing, Transition,
                                 population_deviation, population_sum)
from mlafdtd.driver import (advance, mms_convergence_study, prepare,
                            soliton_study, write_convergence_csv,
                            write_snapshot)
from mlafdtd.errors import NonFiniteField
from mlafdtd.materials import MaterialParams, builtin_material
from mlafdtd.ode import advance_prescribed_e, cosine_field, energy_pn_point
from mlafdtd.stepper import step
from tests._reference import ode_reference
from tests.conftest import single_domain_cfg, two_domain_cfg

OUT_DIR = os.path.join(os.path.dirname(__file__), "_acceptance_out")


def report(num, ok, detail):
    print(f"CRITERION {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def test_criterion_1_single_domain_mms_rates():
    t0 = time.perf_counter()
    mat = builtin_material("mlaMat2")
    rates = {}
    for order, band in ((2, (1.7, 2.3)), (4, (3.5, 4.5))):
        cfg = single_domain_cfg(mat, order=order, n=20, t_final=1.0)
        rows = mms_convergence_study(cfg, [20, 40, 80])
        rates[order] = [r for _, _, r in rows[1:]]
        for r in rates[order]:
            if not (band[0] <= r <= band[1]):
                report(1, False, f"order {order} rate {r:.3f} outside {band}")
    elapsed = time.perf_counter() - t0
    report(1, elapsed < 120.0,
           f"order-2 rates {[f'{r:.2f}' for r in rates[2]]}, "
           f"order-4 rates {[f'{r:.2f}' for r in rates[4]]}, "
           f"{elapsed:.0f}s")


def test_criterion_2_planar_interface_mms_rates():
    t0 = time.perf_counter()
    m1 = builtin_material("mlaMat2")
    m2 = builtin_material("mlaMat3")
    os.makedirs(OUT_DIR, exist_ok=True)
    rates = {}
    for order, band in ((2, (1.7, 2.3)), (4, (3.5, 4.5))):
        cfg = two_domain_cfg(m1, m2, order=order, t_final=1.0)
        rows = mms_convergence_study(cfg, [10, 20, 40])
        write_convergence_csv(rows, os.path.join(
            OUT_DIR, f"interface_convergence_order{order}.csv"))
        rates[order] = [r for _, _, r in rows[1:]]
        for r in rates[order]:
            if not (band[0] <= r <= band[1]):
                report(2, False, f"order {order} rate {r:.3f} outside {band}")
    elapsed = time.perf_counter() - t0
    report(2, elapsed < 180.0,
           f"order-2 rates {[f'{r:.2f}' for r in rates[2]]}, "
           f"order-4 rates {[f'{r:.2f}' for r in rates[4]]}, "
           f"{elapsed:.0f}s")


def test_criterion_3_soliton_self_convergence_and_profile():
    t0 = time.perf_counter()
    os.makedirs(OUT_DIR, exist_ok=True)
    results = {}
    for order, nominal in ((2, 2.0), (4, 4.0)):
        res = soliton_study(order, hs=(0.5, 0.25, 0.125), t_final=100.0)
        results[order] = res
        if abs(res["rate"] - nominal) > 0.5:
            report(3, False,
                   f"order {order} self-rate {res['rate']:.3f} not "
                   f"{nominal}+-0.5")
    res4 = results[4]
    write_snapshot(res4["runs"][1].states[0],
                   os.path.join(OUT_DIR, "soliton_line.csv"))
    ok = (-1.05 <= res4["minD"] <= -0.90
          and abs(res4["minDLocation"] - 50.0) < 5.0
          and 1.8 <= res4["maxAbsE"] <= 2.2)
    elapsed = time.perf_counter() - t0
    report(3, ok and elapsed < 180.0,
           f"self-rates {results[2]['rate']:.2f}/{results[4]['rate']:.2f}, "
           f"min D {res4['minD']:.3f} at x={res4['minDLocation']:.1f}, "
           f"max|E| {res4['maxAbsE']:.3f}, {elapsed:.0f}s")


def test_criterion_4_population_conservation():
    # stiff four-level material: the nonlinear terms narrow the stable
    # time-step below the pure-Maxwell limit, so run at cfl 0.45
    mat = builtin_material("mlaMat4levels")
    cfg = SimulationConfig(
        order=4, dim=1,
        domains=[DomainConfig(material=mat, lo=(-4.0,), hi=(4.0,), n=(800,),
                              bc=(("periodic", "periodic"),))],
        solution="gaussian-plane-wave", cfl=0.45, steps=5000, t_final=1.0)
    run = prepare(cfg)
    s0 = population_sum(run.states[0]).copy()
    worst = [0.0]

    def track(r, k):
        if k % 100 == 0:
            worst[0] = max(worst[0], population_deviation(r.states[0], s0))

    advance(run, on_step=track)
    worst[0] = max(worst[0], population_deviation(run.states[0], s0))
    report(4, worst[0] <= 1e-9,
           f"max |sum N - sum N(0)| = {worst[0]:.3e} over 5000 steps")


def test_criterion_5_energy_drift_orders():
    omega, kappa, hbar_omega = 2.0, 0.5, 0.8
    mat = MaterialParams(
        num_polarization=1, num_levels=2, eps0=1.0, mu0=1.0,
        a=np.array([[kappa, -kappa]]), b0=np.array([omega**2]),
        b1=np.array([0.0]), alpha=np.zeros((2, 2)),
        beta=np.array([[-1.0 / hbar_omega], [1.0 / hbar_omega]]),
        name="twoLevelRestricted")
    pairing = EnergyPairing(mat, [Transition(0, 1, omega, kappa, 0.0,
                                             hbar_omega)])
    e_of_t = cosine_field(0.5, 1.3, 0.2)
    p0, pt0 = np.array([[0.1]]), np.array([[0.05]])
    n0 = np.array([0.7, 0.3])
    measured = {}
    for order in (2, 4):
        drifts = []
        for nsteps in (200, 400, 800):
            dt = 10.0 / nsteps
            h = advance_prescribed_e(mat, e_of_t, p0, pt0, n0, dt, nsteps,
                                     order)
            en = [energy_pn_point(mat, pairing, h.p[k], h.pt[k], h.n[k])
                  for k in range(len(h.times))]
            drifts.append(max(abs(e - en[0]) for e in en))
        measured[order] = [math.log2(a / b)
                           for a, b in zip(drifts, drifts[1:])]
        for r in measured[order]:
            if abs(r - order) > 0.5:
                report(5, False, f"order {order} drift rate {r:.3f}")
    report(5, True,
           f"drift rates order-2 {[f'{r:.2f}' for r in measured[2]]}, "
           f"order-4 {[f'{r:.2f}' for r in measured[4]]}")


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_criterion_6_stability_envelope():
    vac = builtin_material("vacuum")

    def cfg(order, cfl, steps):
        return SimulationConfig(
            order=order, dim=1,
            domains=[DomainConfig(material=vac, lo=(-4.0,), hi=(4.0,),
                                  n=(160,), bc=(("periodic", "periodic"),))],
            solution="gaussian-plane-wave", cfl=cfl, steps=steps,
            t_final=1.0)

    bounded = {}
    for order in (2, 4):
        run = prepare(cfg(order, 0.9, 10000))
        e0 = float(np.abs(run.states[0].E[1]).max())
        advance(run)
        e1 = float(np.abs(run.states[0].E[1]).max())
        bounded[order] = e1 / e0
        if e1 >= 10.0 * e0:
            report(6, False, f"order {order} grew by {e1 / e0:.2f}x")
    run = prepare(cfg(2, 2.5, 500))
    try:
        advance(run)
        report(6, False, "cfl=2.5 run stayed finite for 500 steps")
    except NonFiniteField as exc:
        blow_step = exc.step
    report(6, True,
           f"cfl 0.9 growth {bounded[2]:.2f}x/{bounded[4]:.2f}x over 1e4 "
           f"steps; cfl 2.5 non-finite at step {blow_step}")


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_criterion_7_ode_oracle_and_stencil_invariants():
    # part 1: 0D mode matches an independent reference at O(dt^2)
    from mlafdtd.core import FieldState, GridSpec
    from mlafdtd.boundary import apply_periodic_state
    mat = builtin_material("mlaMat3")
    y0 = {"E": [0.5], "Et": [0.1], "P": [[0.2]], "Pt": [[-0.1]], "N": [0.8]}
    t_final = 1.0
    ref = ode_reference(mat, y0, [t_final])
    e_ref, _, p_ref, _, n_ref = ref[t_final]
    errs = []
    for nsteps in (50, 100, 200):
        dt = t_final / nsteps
        back = ode_reference(mat, y0, [-dt])
        em, _, pm, _, _ = back[-dt]
        grid = GridSpec(dim=1, lo=(0.0,), hi=(1.0,), n=(16,), n_ghost=2)
        st = FieldState(grid, mat)
        st.E[1][...] = y0["E"][0]
        st.E[0][...] = em[0]
        st.P[1][...] = y0["P"][0][0]
        st.P[0][...] = pm[0, 0]
        st.N[0][...] = y0["N"][0]
        for _ in range(nsteps):
            step(st, dt, 2)
            st.rotate(dt)
            apply_periodic_state(st, 0)
        i = grid.n_ghost + 4
        errs.append(max(abs(st.E[1][0, i] - e_ref[0]),
                        abs(st.P[1][0, 0, i] - p_ref[0, 0]),
                        abs(st.N[0][0, i] - n_ref[0])))
    ratios = [errs[k] / errs[k + 1] for k in range(2)]
    for r in ratios:
        if abs(r - 4.0) > 1.2:
            report(7, False, f"0D error ratio {r:.2f} not ~4")

    # part 2: stencil polynomial exactness and linearity (exact identities)
    from mlafdtd.core import GridSpec as GS
    from mlafdtd.stencils import (first_deriv2, lap2, lap4, lap_sq2)
    g = GS(dim=1, lo=(0.0,), hi=(1.0,), n=(24,), n_ghost=3)
    x = g.axis_coords(0)
    checks = [
        np.allclose(lap2(x**2, g)[3:-3], 2.0, atol=1e-10),
        np.allclose(lap4(x**4, g)[3:-3], 12.0 * x[3:-3] ** 2, atol=1e-8),
        np.allclose(lap_sq2(x**4, g)[3:-3], 24.0, rtol=1e-6),
        np.allclose(first_deriv2(x, g, 0)[3:-3], 1.0, atol=1e-12),
    ]
    rng = np.random.default_rng(1)
    u, v = rng.standard_normal(g.shape), rng.standard_normal(g.shape)
    lin = lap4(1.3 * u - 0.4 * v, g) - (1.3 * lap4(u, g) - 0.4 * lap4(v, g))
    checks.append(np.max(np.abs(lin)) < 1e-13 * (np.max(np.abs(lap4(u, g)))
                                                 + 1.0))
    report(7, all(checks),
           f"0D ratios {[f'{r:.2f}' for r in ratios]}; stencil identities "
           f"{'ok' if all(checks) else 'violated'}")


def test_criterion_8_artifacts_for_plots_exist():
    # [SECONDARY] consumes these: assert this suite produced them
    conv = os.path.join(OUT_DIR, "interface_convergence_order4.csv")
    line = os.path.join(OUT_DIR, "soliton_line.csv")
    ok = os.path.exists(conv) and os.path.exists(line)
    report(8, ok,
           "artifacts for the plotting package present "
           "(rendering asserted by frontend tests)")

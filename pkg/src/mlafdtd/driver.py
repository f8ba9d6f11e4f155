"""Run orchestration: boundary prep, time loops, snapshots, studies."""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .boundary import apply_dirichlet_exact, apply_periodic_state
from .core import (DomainConfig, FieldState, SimulationConfig,
                   compute_time_step)
from .errors import ConfigError, IoError
from .interface import InterfaceSpec, PlanarInterface
from .materials import soliton_material
from .solutions import (ForcingEvaluator, GaussianPlaneWaveProvider,
                        ManufacturedProvider, SolitonParams, SolitonProvider,
                        ZeroSolution, default_manufactured,
                        initialize_from_solution)
from .stepper import step


def make_provider(cfg: SimulationConfig, idom: int):
    """Solution provider (and manufactured solution, if any) for a domain."""
    dom = cfg.domains[idom]
    if cfg.solution == "manufactured":
        sol = default_manufactured(dom.material, cfg.dim,
                                   variant=int(cfg.solution_params.get(
                                       "variant", 0)))
        return ManufacturedProvider(sol), sol
    if cfg.solution == "soliton":
        params = SolitonParams(
            x0=float(cfg.solution_params.get("x0", 0.0)),
            U=float(cfg.solution_params.get("U", 0.5)),
            eta=float(cfg.solution_params.get("eta", 1.0)),
            c=float(cfg.solution_params.get("c", 1.0)),
            delta_hat=float(cfg.solution_params.get("deltaHat", 0.1)))
        return SolitonProvider(params), None
    if cfg.solution == "gaussian-plane-wave":
        return GaussianPlaneWaveProvider(dom.material, cfg.dim), None
    return ZeroSolution(dom.material, cfg.dim), None


@dataclass
class Run:
    """A prepared simulation: states, providers, forcing, interface."""

    cfg: SimulationConfig
    dt: float
    steps: int
    states: list
    providers: list
    evaluators: list          # ForcingEvaluator or None per domain
    interface: PlanarInterface | None = None
    snapshots: list = field(default_factory=list)

    @property
    def t(self) -> float:
        return self.states[0].t


def _choose_dt(cfg: SimulationConfig, grids, materials) -> tuple:
    """CFL dt over all domains, then rounded down to land on tFinal."""
    dt_cfl = min(compute_time_step(m, g, cfg.cfl)
                 for m, g in zip(materials, grids))
    if cfg.steps is not None:
        return dt_cfl, cfg.steps
    n = max(1, int(math.ceil(cfg.t_final / dt_cfl - 1e-12)))
    return cfg.t_final / n, n


def prepare(cfg: SimulationConfig) -> Run:
    grids = [cfg.grid_for(i) for i in range(len(cfg.domains))]
    materials = [d.material for d in cfg.domains]
    dt, steps = _choose_dt(cfg, grids, materials)
    states, providers, evaluators = [], [], []
    needs_grad = cfg.solution == "manufactured" and len(cfg.domains) == 2
    for i, dom in enumerate(cfg.domains):
        st = FieldState(grids[i], dom.material)
        provider, sol = make_provider(cfg, i)
        initialize_from_solution(st, grids[i], provider, dt)
        states.append(st)
        providers.append(provider)
        if sol is not None:
            evaluators.append(ForcingEvaluator(sol, dom.material, grids[i],
                                               with_gradients=needs_grad))
        else:
            evaluators.append(None)
    run = Run(cfg=cfg, dt=dt, steps=steps, states=states,
              providers=providers, evaluators=evaluators)
    if len(cfg.domains) == 2:
        spec = _interface_spec(cfg)
        run.interface = PlanarInterface(spec, states[0], states[1], cfg.order)
    _prep_boundaries(run, t=0.0, forcings=_forcings(run, 0.0))
    return run


def _interface_spec(cfg: SimulationConfig) -> InterfaceSpec:
    ax = cfg.interface_axis
    d0, d1 = cfg.domains
    if abs(d0.hi[ax] - d1.lo[ax]) < 1e-12:
        return InterfaceSpec(axis=ax, side1=1, side2=0)
    if abs(d1.hi[ax] - d0.lo[ax]) < 1e-12:
        return InterfaceSpec(axis=ax, side1=0, side2=1)
    raise ConfigError("domains do not share a face along interfaceAxis")


def _forcings(run: Run, t: float):
    out = []
    for ev in run.evaluators:
        out.append(None if ev is None else ev.sample(t, run.cfg.order))
    return out


def _normal_jump(run: Run, t: float):
    """Exact jump of eps*En + sum_m Pn_m across the interface (MMS runs)."""
    if run.cfg.solution != "manufactured" or run.interface is None:
        return None
    iface = run.interface
    cn = iface.spec.axis
    out = []
    for ops, provider in zip((iface.s1, iface.s2), run.providers):
        grid = ops.grid
        coords = []
        for k, c in enumerate(grid.coords()):
            if k == iface.spec.axis:
                sl = [slice(None)] * grid.dim
                sl[k] = slice(ops.ib, ops.ib + 1)
                coords.append(c[tuple(sl)])
            else:
                coords.append(c)
        e = provider.eval_e(coords, t)
        p = provider.eval_p(coords, t)
        val = ops.mat.eps0 * e[cn] + np.sum(p[:, cn], axis=0)
        # collapse the normal axis and clip to the physical tangential range
        val = np.squeeze(val, axis=iface.spec.axis)
        if grid.dim == 2:
            ng = grid.n_ghost
            val = val[ng:ng + ops.nt]
        out.append(val)
    return out[0] - out[1]


def _prep_boundaries(run: Run, t: float, forcings):
    """Fill all ghosts for the current level: physical faces then interface."""
    cfg = run.cfg
    for idom, st in enumerate(run.states):
        dom = cfg.domains[idom]
        for ax in range(cfg.dim):
            for side in range(2):
                if dom.bc[ax][side] == "dirichlet-exact":
                    apply_dirichlet_exact(st, ax, side,
                                          run.providers[idom], t)
        for ax in range(cfg.dim):
            if dom.bc[ax][0] == "periodic":
                apply_periodic_state(st, ax)
    iface = run.interface
    if iface is not None:
        iface.extrapolate_material_ghosts()
        iface.enforce_values(normal_jump=_normal_jump(run, t))
        if cfg.order == 2:
            iface.fill_order2(run.dt, forcings[0], forcings[1])
        else:
            iface.fill_order4(run.dt, forcings[0], forcings[1])
        # refresh corner ghosts: tangential periodic images of new values
        for idom, st in enumerate(run.states):
            dom = cfg.domains[idom]
            for ax in range(cfg.dim):
                if dom.bc[ax][0] == "periodic":
                    apply_periodic_state(st, ax)


def advance(run: Run, n_steps: int | None = None, on_step=None):
    """March the run forward; ghosts are valid on entry and on exit."""
    cfg = run.cfg
    total = run.steps if n_steps is None else n_steps
    check_every = max(1, cfg.nan_check_every)
    for k in range(total):
        t = run.t
        forcings = _forcings(run, t)
        for st, f in zip(run.states, forcings):
            step(st, run.dt, cfg.order, f)
        for st in run.states:
            st.rotate(run.dt)
        t_new = run.t
        forcings = _forcings(run, t_new)
        _prep_boundaries(run, t_new, forcings)
        if (k + 1) % check_every == 0 or k + 1 == total:
            for st in run.states:
                st.check_finite()
        if on_step is not None:
            on_step(run, k + 1)
    return run


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def field_columns(state: FieldState):
    """Column names and interior arrays for one snapshot."""
    d = state.grid.dim
    comp = ("x", "y")[:d]
    cols, arrays = [], []
    interior = state.grid.interior
    for c in range(d):
        cols.append("E" + comp[c] if d == 2 else "E")
        arrays.append(state.E[1][(c,) + interior])
    for m in range(state.material.num_polarization):
        for c in range(d):
            name = f"P{m + 1}" + (comp[c] if d == 2 else "")
            cols.append(name)
            arrays.append(state.P[1][(m, c) + interior])
    for loft in range(state.material.num_levels):
        cols.append(f"N{loft}")
        arrays.append(state.N[0][(loft,) + interior])
    return cols, arrays


def write_snapshot(state: FieldState, path: str):
    """One CSV per snapshot; coordinates first, 17 significant digits."""
    grid = state.grid
    cols, arrays = field_columns(state)
    coord_names = ["x", "y"][:grid.dim]
    try:
        with open(path, "w") as fh:
            fh.write(",".join(coord_names + cols) + "\n")
            interior = grid.interior
            axes = [grid.axis_coords(k)[interior[k]] for k in range(grid.dim)]
            mesh = np.meshgrid(*axes, indexing="ij")
            flat = [m.ravel() for m in mesh] + [a.ravel() for a in arrays]
            for row in zip(*flat):
                fh.write(",".join(f"{v:.17e}" for v in row) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write snapshot {path}: {exc}") from exc


def run_simulation(cfg: SimulationConfig, out_dir: str | None = None) -> dict:
    """Full run with snapshots and manifest; returns the manifest dict."""
    out = out_dir or cfg.out_dir
    os.makedirs(out, exist_ok=True)
    t0 = time.perf_counter()
    run = prepare(cfg)
    snap_files = []

    def snap(state_list, tag):
        files = []
        for i, st in enumerate(state_list):
            suffix = f"_d{i}" if len(state_list) > 1 else ""
            path = os.path.join(out, f"snapshot_{tag}{suffix}.csv")
            write_snapshot(st, path)
            files.append(path)
        snap_files.append({"step": tag, "files": files})

    every = cfg.snapshot_every

    def on_step(r, k):
        if every > 0 and k % every == 0 and k != r.steps:
            snap(r.states, f"{k:06d}")

    advance(run, on_step=on_step)
    snap(run.states, "final")

    diag = {}
    for i, st in enumerate(run.states):
        key = f"domain{i}" if len(run.states) > 1 else "domain"
        diag[key] = {"maxAbsE": float(np.max(np.abs(
            st.E[1][(slice(None),) + st.grid.interior])))}
        if run.providers[i] is not None and cfg.solution != "zero":
            from .diagnostics import max_norm_error
            diag[key]["errMaxE"] = max_norm_error(st, run.providers[i],
                                                  run.t, "E")
            diag[key]["errMaxAll"] = max_norm_error(st, run.providers[i],
                                                    run.t, "EPN")
    manifest = {
        "order": cfg.order,
        "dim": cfg.dim,
        "solution": cfg.solution,
        "cfl": cfg.cfl,
        "dt": run.dt,
        "dtCfl": min(compute_time_step(d.material, cfg.grid_for(i), cfg.cfl)
                     for i, d in enumerate(cfg.domains)),
        "steps": run.steps,
        "tFinal": run.t,
        "wallTime": time.perf_counter() - t0,
        "snapshots": snap_files,
        "diagnostics": diag,
    }
    mpath = os.path.join(out, "manifest.json")
    with open(mpath, "w") as fh:
        json.dump(manifest, fh, indent=2)
    manifest["manifestPath"] = mpath
    return manifest


def convergence_table(results):
    """(h, err) pairs -> rows of (h, err, rate or nan)."""
    from .diagnostics import convergence_rate
    rates = [float("nan")] + convergence_rate(results)
    return [(h, e, r) for (h, e), r in zip(results, rates)]


def write_convergence_csv(rows, path: str, extra_cols=None):
    with open(path, "w") as fh:
        header = "h,err,rate"
        if extra_cols:
            header += "," + ",".join(extra_cols[0].keys())
        fh.write(header + "\n")
        for i, (h, e, r) in enumerate(rows):
            line = f"{h:.17e},{e:.17e},{r:.6f}"
            if extra_cols:
                line += "," + ",".join(f"{v:.17e}" if isinstance(v, float)
                                       else str(v)
                                       for v in extra_cols[i].values())
            fh.write(line + "\n")


# ---------------------------------------------------------------------------
# studies
# ---------------------------------------------------------------------------

def with_resolution(cfg: SimulationConfig, cells_per_unit: int) -> SimulationConfig:
    """Copy of cfg with every domain meshed at cells_per_unit per unit length."""
    from dataclasses import replace
    doms = []
    for d in cfg.domains:
        n = tuple(max(1, int(round(cells_per_unit * (d.hi[k] - d.lo[k]))))
                  for k in range(cfg.dim))
        doms.append(replace(d, n=n))
    return replace(cfg, domains=doms)


def mms_convergence_study(cfg: SimulationConfig, resolutions,
                          details: list | None = None) -> list:
    """Run the manufactured problem at several resolutions.

    resolutions are cells per unit length; returns rows (h, err, rate)
    with err the max norm over all fields and domains at t_final.  When
    `details` is passed, one dict per row with dt and per-field errors
    is appended to it (the convergence CSV's extra columns).
    """
    from .diagnostics import max_norm_error
    results = []
    for r in resolutions:
        c = with_resolution(cfg, r)
        run = prepare(c)
        advance(run)
        err = max(max_norm_error(st, pr, run.t, "EPN")
                  for st, pr in zip(run.states, run.providers))
        results.append((1.0 / r, err))
        if details is not None:
            per = {"dt": run.dt}
            for name in ("E", "P", "N"):
                per["errMax" + name] = max(
                    max_norm_error(st, pr, run.t, name)
                    for st, pr in zip(run.states, run.providers))
            details.append(per)
    return convergence_table(results)


def soliton_study(order: int, hs=(0.5, 0.25, 0.125), t_final: float = 100.0,
                  length: float = 1000.0, cfl: float = 0.9,
                  params: SolitonParams | None = None) -> dict:
    """Self-convergence of the traveling envelope benchmark on nested grids."""
    from .diagnostics import self_convergence
    params = params or SolitonParams()
    mat = soliton_material(params.eta, params.c, params.delta_hat)
    runs = []
    for h in hs:
        n = int(round(length / h))
        cfg = SimulationConfig(
            order=order, dim=1,
            domains=[DomainConfig(
                material=mat, lo=(0.0,), hi=(length,), n=(n,),
                bc=(("dirichlet-exact", "dirichlet-exact"),))],
            solution="soliton", cfl=cfl, t_final=t_final,
            solution_params={"x0": params.x0, "U": params.U,
                             "eta": params.eta, "c": params.c,
                             "deltaHat": params.delta_hat})
        run = prepare(cfg)
        advance(run)
        runs.append(run)
    e_fields = [r.states[0].E[1][(0,) + r.states[0].grid.interior]
                for r in runs]
    est_err, rate = self_convergence(e_fields[0], e_fields[1], e_fields[2],
                                     dim=1)
    fine = runs[-1].states[0]
    interior = fine.grid.interior
    n_vals = fine.N[0][(0,) + interior]
    e_vals = fine.E[1][(0,) + interior]
    x = fine.grid.axis_coords(0)[interior[0]]
    i_min = int(np.argmin(n_vals))
    return {
        "order": order,
        "hs": list(hs),
        "estErr": est_err,
        "rate": rate,
        "minD": float(n_vals[i_min]),
        "minDLocation": float(x[i_min]),
        "maxAbsE": float(np.max(np.abs(e_vals))),
        "runs": runs,
    }

"""Command-line driver.

Subcommands map onto the verification workflow: `run` executes one
configuration, `convergence` sweeps resolutions, `soliton` runs the
traveling-envelope benchmark with a self-convergence estimate,
`energy-check` integrates the restricted 0D system, `materials` and
`schema` are informational.

Exit codes: 0 success, 2 configuration error, 3 I/O error,
4 instability (non-finite fields).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .core import CONFIG_SCHEMA, load_config
from .errors import ConfigError, IoError, MlaError, NonFiniteField
from .materials import builtin_material, builtin_names

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_UNSTABLE = 4


def _apply_overrides(cfg, args):
    from dataclasses import replace
    kw = {}
    if args.order is not None:
        kw["order"] = args.order
    if args.cfl is not None:
        kw["cfl"] = args.cfl
    if args.out is not None:
        kw["out_dir"] = args.out
    if getattr(args, "steps", None) is not None:
        kw["steps"] = args.steps
    if getattr(args, "tfinal", None) is not None:
        kw["t_final"] = args.tfinal
        kw.setdefault("steps", None)
    if getattr(args, "snapshot_every", None) is not None:
        kw["snapshot_every"] = args.snapshot_every
    return replace(cfg, **kw) if kw else cfg


def _cmd_run(args) -> int:
    from .driver import run_simulation
    cfg = _apply_overrides(load_config(args.config), args)
    manifest = run_simulation(cfg)
    print(json.dumps({k: v for k, v in manifest.items()
                      if k not in ("snapshots",)}, indent=2))
    print(f"wrote {manifest['manifestPath']}")
    return EXIT_OK


def _cmd_convergence(args) -> int:
    from .driver import mms_convergence_study, write_convergence_csv
    cfg = _apply_overrides(load_config(args.config), args)
    if cfg.solution != "manufactured":
        raise ConfigError("convergence study requires solution=manufactured")
    resolutions = [int(r) for r in args.resolutions.split(",")]
    details: list = []
    rows = mms_convergence_study(cfg, resolutions, details=details)
    out = args.out or cfg.out_dir
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, f"convergence_order{cfg.order}.csv")
    write_convergence_csv(rows, path, extra_cols=details)
    for h, e, r in rows:
        print(f"h={h:<12.6g} err={e:<14.6e} rate={r:.3f}")
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_soliton(args) -> int:
    from .driver import soliton_study, write_snapshot, write_convergence_csv
    hs = [float(h) for h in args.hs.split(",")]
    res = soliton_study(args.order or 4, hs=hs, t_final=args.tfinal or 100.0,
                        cfl=args.cfl or 0.9)
    out = args.out or "out"
    os.makedirs(out, exist_ok=True)
    snap = os.path.join(out, f"soliton_order{res['order']}.csv")
    write_snapshot(res["runs"][-1].states[0], snap)
    rows = [(hs[0], res["estErr"], res["rate"])]
    table = os.path.join(out, f"soliton_selfconv_order{res['order']}.csv")
    write_convergence_csv(rows, table)
    print(f"self-convergence estErr={res['estErr']:.4e} rate={res['rate']:.3f}")
    print(f"min D = {res['minD']:.4f} at x = {res['minDLocation']:.2f}; "
          f"max |E| = {res['maxAbsE']:.4f}")
    print(f"wrote {snap} and {table}")
    return EXIT_OK


def _cmd_energy_check(args) -> int:
    from .diagnostics import EnergyPairing, Transition
    from .materials import MaterialParams
    from .ode import advance_prescribed_e, cosine_field, energy_pn_point
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
    t_final = args.tfinal or 10.0
    order = args.order or 2
    drifts = []
    step_counts = [int(s) for s in args.steps_list.split(",")]
    for nsteps in step_counts:
        dt = t_final / nsteps
        h = advance_prescribed_e(mat, e_of_t, p0, pt0, n0, dt, nsteps, order)
        en = [energy_pn_point(mat, pairing, h.p[k], h.pt[k], h.n[k])
              for k in range(len(h.times))]
        drifts.append(max(abs(e - en[0]) for e in en))
        print(f"steps={nsteps:<6d} dt={dt:<10.4e} drift={drifts[-1]:.6e}")
    for a, b in zip(drifts, drifts[1:]):
        print(f"rate={np.log2(a / b):.3f}")
    return EXIT_OK


def _cmd_materials(_args) -> int:
    for name in builtin_names():
        m = builtin_material(name)
        print(f"{name:<16s} N_p={m.num_polarization} N_n={m.num_levels} "
              f"eps0={m.eps0} mu0={m.mu0} c={m.c:.6g}")
    return EXIT_OK


def _cmd_schema(_args) -> int:
    print(CONFIG_SCHEMA)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mlafdtd",
        description="FDTD solver for Maxwell's equations coupled to "
                    "multi-level atomic media")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--order", type=int, choices=(2, 4))
        p.add_argument("--out", help="output directory")
        p.add_argument("--cfl", type=float)

    p = sub.add_parser("run", help="execute one configuration")
    common(p)
    p.add_argument("--steps", type=int)
    p.add_argument("--tfinal", type=float)
    p.add_argument("--snapshot-every", type=int, dest="snapshot_every")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("convergence", help="grid refinement sweep")
    common(p)
    p.add_argument("--resolutions", default="10,20,40",
                   help="comma list of cells per unit length")
    p.set_defaults(func=_cmd_convergence)

    p = sub.add_parser("soliton", help="traveling envelope benchmark")
    common(p, config=False)
    p.add_argument("--hs", default="0.5,0.25,0.125")
    p.add_argument("--tfinal", type=float)
    p.set_defaults(func=_cmd_soliton)

    p = sub.add_parser("energy-check", help="restricted 0D energy drift")
    common(p, config=False)
    p.add_argument("--tfinal", type=float)
    p.add_argument("--steps-list", default="200,400,800", dest="steps_list")
    p.set_defaults(func=_cmd_energy_check)

    p = sub.add_parser("materials", help="list built-in materials")
    p.set_defaults(func=_cmd_materials)

    p = sub.add_parser("schema", help="print the config JSON schema")
    p.set_defaults(func=_cmd_schema)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IoError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NonFiniteField as exc:
        print(f"instability: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except MlaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""Grids, field storage, time-step rule, and run configuration."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, NonFiniteField, NonPositivePhysical
from .materials import MaterialParams, build_material, builtin_material


@dataclass(frozen=True)
class GridSpec:
    """Vertex-centered Cartesian box with a ghost-point margin.

    Physical points are x_j = lo + j*h for j = 0..n (n cells, n+1 points)
    per axis; arrays carry n_ghost extra layers on every side.
    """

    dim: int
    lo: tuple
    hi: tuple
    n: tuple
    n_ghost: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ConfigError(f"dim must be 1 or 2, got {self.dim}")
        if not (len(self.lo) == len(self.hi) == len(self.n) == self.dim):
            raise ConfigError("lo/hi/n lengths must match dim")
        # Stencils reach at most 2 points, so that is the hard requirement;
        # a third ghost layer (order-4 corner margin) does not shrink the
        # admissible grids.
        need = 4 * min(self.n_ghost, 2)
        for k in range(self.dim):
            if self.hi[k] <= self.lo[k]:
                raise NonPositivePhysical(f"axis {k}: hi <= lo")
            if self.n[k] < need:
                raise ConfigError(
                    f"axis {k}: n={self.n[k]} < {need} (stencil support)")

    @property
    def h(self) -> tuple:
        return tuple((self.hi[k] - self.lo[k]) / self.n[k]
                     for k in range(self.dim))

    @property
    def shape(self) -> tuple:
        """Total array extents including ghosts."""
        return tuple(self.n[k] + 1 + 2 * self.n_ghost
                     for k in range(self.dim))

    @property
    def interior(self) -> tuple:
        """Slices selecting the physical points (boundary lines included)."""
        ng = self.n_ghost
        return tuple(slice(ng, ng + self.n[k] + 1) for k in range(self.dim))

    def axis_coords(self, k: int) -> np.ndarray:
        """Coordinates along axis k for every index including ghosts."""
        idx = np.arange(self.shape[k]) - self.n_ghost
        return self.lo[k] + idx * self.h[k]

    def coords(self) -> list[np.ndarray]:
        """Broadcastable coordinate arrays (incl. ghosts) for all axes."""
        out = []
        for k in range(self.dim):
            shape = [1] * self.dim
            shape[k] = self.shape[k]
            out.append(self.axis_coords(k).reshape(shape))
        return out


class FieldState:
    """Three time levels of E and P plus two of N on one grid.

    Level order is (n-1, n, n+1); `rotate` advances the window without
    copying.  Exactly one stepping context may mutate a state at a time.
    """

    def __init__(self, grid: GridSpec, material: MaterialParams):
        self.grid = grid
        self.material = material
        d = grid.dim  # one E/P component per space dimension
        shape = grid.shape
        self.E = [np.zeros((d,) + shape) for _ in range(3)]
        self.P = [np.zeros((material.num_polarization, d) + shape)
                  for _ in range(3)]
        self.N = [np.zeros((material.num_levels,) + shape) for _ in range(2)]
        self.t = 0.0
        self.step_index = 0

    @property
    def ncomp(self) -> int:
        return self.grid.dim

    def rotate(self, dt: float):
        """Advance the window: (n) -> (n-1), (n+1) -> (n)."""
        self.E = [self.E[1], self.E[2], self.E[0]]
        self.P = [self.P[1], self.P[2], self.P[0]]
        self.N = [self.N[1], self.N[0]]
        self.t += dt
        self.step_index += 1

    def check_finite(self):
        for name, arr in (("E", self.E[1]), ("P", self.P[1]), ("N", self.N[0])):
            if not np.all(np.isfinite(arr)):
                raise NonFiniteField(
                    f"non-finite {name} at step {self.step_index}, t={self.t:.6g}",
                    step=self.step_index, t=self.t)


def compute_time_step(material: MaterialParams, grid: GridSpec,
                      cfl: float) -> float:
    """Time step from c^2 dt^2 sum_k(1/h_k^2) = C_cfl, read literally."""
    if cfl <= 0:
        raise NonPositivePhysical(f"cfl={cfl} must be positive")
    inv = sum(1.0 / hk**2 for hk in grid.h)
    return math.sqrt(cfl / (material.c**2 * inv))


def ghost_width_for_order(order: int) -> int:
    """2 ghost layers for order-2 runs, 3 for order-4."""
    return {2: 2, 4: 3}[order]


_SOLUTION_KINDS = ("manufactured", "soliton", "gaussian-plane-wave", "zero")
_BC_KINDS = ("periodic", "dirichlet-exact")


@dataclass
class DomainConfig:
    """One subdomain: a material plus its grid box."""

    material: MaterialParams
    lo: tuple
    hi: tuple
    n: tuple
    bc: tuple  # per axis: (low, high) pairs of bc names


@dataclass
class SimulationConfig:
    """Fully resolved run description (see `schema` CLI subcommand)."""

    order: int
    dim: int
    domains: list[DomainConfig]
    solution: str = "zero"
    cfl: float = 0.9
    t_final: float = 1.0
    steps: Optional[int] = None
    interface_axis: Optional[int] = None
    snapshot_every: int = 0
    out_dir: str = "out"
    nan_check_every: int = 10
    solution_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.order not in (2, 4):
            raise ConfigError(f"order must be 2 or 4, got {self.order}")
        if self.cfl <= 0:
            raise ConfigError("cfl must be positive")
        if self.steps is None and self.t_final <= 0:
            raise ConfigError("tFinal must be positive")
        if self.solution not in _SOLUTION_KINDS:
            raise ConfigError(f"unknown solution kind {self.solution!r}")
        if len(self.domains) not in (1, 2):
            raise ConfigError("one or two domains supported")
        if len(self.domains) == 2 and self.interface_axis is None:
            raise ConfigError("two domains require interfaceAxis")
        for dom in self.domains:
            for ax_bc in dom.bc:
                for b in ax_bc:
                    if b not in _BC_KINDS + ("interface",):
                        raise ConfigError(f"unknown bc {b!r}")

    def grid_for(self, idom: int) -> GridSpec:
        dom = self.domains[idom]
        return GridSpec(dim=self.dim, lo=dom.lo, hi=dom.hi, n=dom.n,
                        n_ghost=ghost_width_for_order(self.order))


def _material_from_cfg(node) -> MaterialParams:
    if isinstance(node, str):
        return builtin_material(node)
    if isinstance(node, dict) and "file" in node:
        from .materials import load_material_file
        return load_material_file(node["file"])
    return build_material(node)


def config_from_dict(doc: dict) -> SimulationConfig:
    """Deserialize a SimulationConfig from a parsed JSON document."""
    try:
        dim = int(doc["dim"])
        order = int(doc["order"])
        domains = []
        for dnode in doc["domains"]:
            bc = dnode.get("bc")
            if bc is None:
                bc = [["periodic", "periodic"] for _ in range(dim)]
            domains.append(DomainConfig(
                material=_material_from_cfg(dnode["material"]),
                lo=tuple(float(v) for v in dnode["lo"]),
                hi=tuple(float(v) for v in dnode["hi"]),
                n=tuple(int(v) for v in dnode["n"]),
                bc=tuple(tuple(pair) for pair in bc),
            ))
        return SimulationConfig(
            order=order,
            dim=dim,
            domains=domains,
            solution=doc.get("solution", "zero"),
            cfl=float(doc.get("cfl", 0.9)),
            t_final=float(doc.get("tFinal", 1.0)),
            steps=int(doc["steps"]) if "steps" in doc else None,
            interface_axis=doc.get("interfaceAxis"),
            snapshot_every=int(doc.get("snapshotEvery", 0)),
            out_dir=str(doc.get("outDir", "out")),
            nan_check_every=int(doc.get("nanCheckEvery", 10)),
            solution_params=dict(doc.get("solutionParams", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config: {exc}") from exc


def load_config(path: str) -> SimulationConfig:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return config_from_dict(doc)


CONFIG_SCHEMA = """\
Configuration JSON schema (all lengths in grid units):

{
  "dim": 1 | 2,
  "order": 2 | 4,
  "cfl": number > 0            (default 0.9),
  "tFinal": number > 0         (ignored when "steps" given),
  "steps": integer             (optional, overrides tFinal),
  "solution": "manufactured" | "soliton" | "gaussian-plane-wave" | "zero",
  "solutionParams": { ... }    (kind specific, optional),
  "snapshotEvery": integer     (0 = only final snapshot),
  "outDir": path,
  "nanCheckEvery": integer     (default 10),
  "interfaceAxis": 0 | 1       (required for two domains),
  "domains": [
    {
      "material": "mlaMat2" | "mlaMat3" | "mlaMat4levels" | "vacuum"
                  | { numPolarization, numLevels, eps0, mu0,
                      a, b0, b1, alpha, beta },
      "lo": [..], "hi": [..], "n": [..],
      "bc": [[low, high] per axis] with entries
            "periodic" | "dirichlet-exact" | "interface"
    }
  ]
}
"""

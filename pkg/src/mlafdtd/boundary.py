"""Ghost-cell assignment for physical boundaries.

Periodic axes wrap every array entry (ghosts and the duplicated end line)
onto its unique image; Dirichlet faces take boundary and ghost values
from a known solution provider.  One-sided extrapolation is provided for
ghost lines that have no boundary condition of their own (P and N at
material interfaces).
"""

from __future__ import annotations

import numpy as np

from .core import FieldState, GridSpec
from .solutions import SolutionProvider

# 5-point one-sided extrapolation weights: u_g = sum_j c_j u_{g+j*dir},
# exact for polynomials of degree <= 4.
EXTRAP5 = (5.0, -10.0, 10.0, -5.0, 1.0)


def _periodic_index(grid: GridSpec, axis: int) -> np.ndarray:
    ng, n = grid.n_ghost, grid.n[axis]
    idx = np.arange(grid.shape[axis])
    return ng + (idx - ng) % n


def apply_periodic(arr: np.ndarray, grid: GridSpec, axis: int):
    """Wrap all entries along a spatial axis onto the period-n image."""
    ax = arr.ndim - grid.dim + axis
    arr[...] = np.take(arr, _periodic_index(grid, axis), axis=ax)


def apply_periodic_state(state: FieldState, axis: int, levels=(1,)):
    """Periodic wrap of E, P (given levels) and current N along one axis."""
    grid = state.grid
    for lvl in levels:
        apply_periodic(state.E[lvl], grid, axis)
        apply_periodic(state.P[lvl], grid, axis)
    apply_periodic(state.N[0], grid, axis)


def _face_slice(grid: GridSpec, axis: int, side: int) -> slice:
    """Index range covering the boundary line plus all ghost layers."""
    ng = grid.n_ghost
    if side == 0:
        return slice(0, ng + 1)
    return slice(grid.shape[axis] - ng - 1, grid.shape[axis])


def apply_dirichlet_exact(state: FieldState, axis: int, side: int,
                          provider: SolutionProvider, t: float):
    """Set boundary-face and ghost values of E, P, N from the solution."""
    grid = state.grid
    fsl = _face_slice(grid, axis, side)
    coords = []
    for k, c in enumerate(grid.coords()):
        if k == axis:
            sl = [slice(None)] * grid.dim
            sl[axis] = fsl
            coords.append(c[tuple(sl)])
        else:
            coords.append(c)

    def assign(dst, values):
        sl = [slice(None)] * dst.ndim
        sl[dst.ndim - grid.dim + axis] = fsl
        dst[tuple(sl)] = values

    assign(state.E[1], provider.eval_e(coords, t))
    assign(state.P[1], provider.eval_p(coords, t))
    assign(state.N[0], provider.eval_n(coords, t))


def extrapolate_face(arr: np.ndarray, grid: GridSpec, axis: int, side: int,
                     n_lines: int | None = None):
    """Fill ghost lines on one face by 5-point one-sided extrapolation."""
    ng = grid.n_ghost
    if n_lines is None:
        n_lines = ng
    ax = arr.ndim - grid.dim + axis
    size = grid.shape[axis]
    for g in range(1, n_lines + 1):
        if side == 0:
            dst = ng - g
            src = [dst + j for j in range(1, 6)]
        else:
            dst = size - 1 - ng + g
            src = [dst - j for j in range(1, 6)]
        sl_dst = [slice(None)] * arr.ndim
        sl_dst[ax] = dst
        acc = np.zeros_like(arr[tuple(sl_dst)])
        for c, j in zip(EXTRAP5, src):
            sl = [slice(None)] * arr.ndim
            sl[ax] = j
            acc += c * arr[tuple(sl)]
        arr[tuple(sl_dst)] = acc

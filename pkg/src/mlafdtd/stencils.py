"""Spatial difference operators on ghost-padded Cartesian grid functions.

Grid functions may carry leading component axes; operators act on the
trailing `grid.dim` axes.  All operators take full arrays (ghosts
included) and return full-size arrays whose valid region is the input
shrunk by the stencil reach per spatial axis (1 for second-order
operators, 2 for the wide ones); entries outside that region are left at
zero.  Callers are responsible for filling ghosts beforehand.
"""

from __future__ import annotations

import numpy as np

from .core import GridSpec
from .errors import ConfigError


def _core(u: np.ndarray, sp: int, reach: int) -> tuple:
    """Slices selecting the margin-`reach` core of the spatial axes."""
    sl = [slice(None)] * (u.ndim - sp)
    sl += [slice(reach, u.shape[k] - reach) for k in range(u.ndim - sp, u.ndim)]
    return tuple(sl)


def _sh(u: np.ndarray, off: int, k: int, sp: int, reach: int) -> np.ndarray:
    """Core view shifted by `off` along spatial axis k."""
    ax = u.ndim - sp + k
    sl = list(_core(u, sp, reach))
    sl[ax] = slice(reach + off, u.shape[ax] - reach + off)
    return u[tuple(sl)]


def lap2(u: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Second-order Laplacian, 3 points per axis."""
    sp = grid.dim
    out = np.zeros_like(u)
    acc = np.zeros(u[_core(u, sp, 1)].shape)
    for k in range(sp):
        acc += (_sh(u, 1, k, sp, 1) - 2.0 * _sh(u, 0, k, sp, 1)
                + _sh(u, -1, k, sp, 1)) / grid.h[k] ** 2
    out[_core(u, sp, 1)] = acc
    return out


def lap4(u: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Fourth-order Laplacian, (-1, 16, -30, 16, -1)/(12 h^2) per axis."""
    sp = grid.dim
    out = np.zeros_like(u)
    acc = np.zeros(u[_core(u, sp, 2)].shape)
    for k in range(sp):
        c = 1.0 / (12.0 * grid.h[k] ** 2)
        acc += c * (-_sh(u, 2, k, sp, 2) + 16.0 * _sh(u, 1, k, sp, 2)
                    - 30.0 * _sh(u, 0, k, sp, 2) + 16.0 * _sh(u, -1, k, sp, 2)
                    - _sh(u, -2, k, sp, 2))
    out[_core(u, sp, 2)] = acc
    return out


def lap_sq2(u: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Squared second-order Laplacian as one fused wide stencil.

    Equals lap2(lap2(u)) wherever both are defined; implemented as the
    tensor composition (Dxx + Dyy)^2 so only one pass over u is needed.
    """
    sp = grid.dim
    out = np.zeros_like(u)
    core = _core(u, sp, 2)
    acc = np.zeros(u[core].shape)
    for k in range(sp):
        c = 1.0 / grid.h[k] ** 4
        acc += c * (_sh(u, 2, k, sp, 2) - 4.0 * _sh(u, 1, k, sp, 2)
                    + 6.0 * _sh(u, 0, k, sp, 2) - 4.0 * _sh(u, -1, k, sp, 2)
                    + _sh(u, -2, k, sp, 2))
    if sp == 2:
        cxy = 2.0 / (grid.h[0] ** 2 * grid.h[1] ** 2)
        w = (1.0, -2.0, 1.0)
        ax0, ax1 = u.ndim - 2, u.ndim - 1
        base = list(_core(u, sp, 2))
        for i, ci in zip((-1, 0, 1), w):
            for j, cj in zip((-1, 0, 1), w):
                sl = list(base)
                sl[ax0] = slice(2 + i, u.shape[ax0] - 2 + i)
                sl[ax1] = slice(2 + j, u.shape[ax1] - 2 + j)
                acc += (cxy * ci * cj) * u[tuple(sl)]
    out[core] = acc
    return out


def lap2_twopass(u: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Reference for lap_sq2: two sequential lap2 applications."""
    return lap2(lap2(u, grid), grid)


def first_deriv2(u: np.ndarray, grid: GridSpec, axis: int) -> np.ndarray:
    """Centered first derivative (u_{j+1} - u_{j-1}) / (2h)."""
    sp = grid.dim
    out = np.zeros_like(u)
    out[_core(u, sp, 1)] = (_sh(u, 1, axis, sp, 1)
                            - _sh(u, -1, axis, sp, 1)) / (2.0 * grid.h[axis])
    return out


def first_deriv4(u: np.ndarray, grid: GridSpec, axis: int) -> np.ndarray:
    """Fourth-order centered first derivative."""
    sp = grid.dim
    out = np.zeros_like(u)
    c = 1.0 / (12.0 * grid.h[axis])
    out[_core(u, sp, 2)] = c * (-_sh(u, 2, axis, sp, 2)
                                + 8.0 * _sh(u, 1, axis, sp, 2)
                                - 8.0 * _sh(u, -1, axis, sp, 2)
                                + _sh(u, -2, axis, sp, 2))
    return out


def lap_product_chain(e_field: np.ndarray, n_field: np.ndarray,
                      grid: GridSpec) -> np.ndarray:
    """Chain-rule Laplacian of a product, per E component:

        Lap(N*E_c) ~= E_c*lap2(N) + N*lap2(E_c) + 2 sum_k dE_c/dx_k dN/dx_k

    everything at second order.  e_field has a leading component axis,
    n_field is scalar.
    """
    out = np.zeros_like(e_field)
    n_lap = lap2(n_field, grid)
    n_grad = [first_deriv2(n_field, grid, k) for k in range(grid.dim)]
    for c in range(e_field.shape[0]):
        ec = e_field[c]
        term = ec * n_lap + n_field * lap2(ec, grid)
        for k in range(grid.dim):
            term = term + 2.0 * first_deriv2(ec, grid, k) * n_grad[k]
        out[c] = term
    return out


def div2(u: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Second-order divergence of a vector grid function."""
    return sum(first_deriv2(u[k], grid, k) for k in range(grid.dim))


def div4(u: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Fourth-order divergence."""
    return sum(first_deriv4(u[k], grid, k) for k in range(grid.dim))


def curl2(u: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Second-order z-component of the curl (2D only): dEy/dx - dEx/dy."""
    if grid.dim != 2:
        raise ConfigError("curl is undefined in 1D")
    return first_deriv2(u[1], grid, 0) - first_deriv2(u[0], grid, 1)


def curl4(u: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Fourth-order z-component of the curl (2D only)."""
    if grid.dim != 2:
        raise ConfigError("curl is undefined in 1D")
    return first_deriv4(u[1], grid, 0) - first_deriv4(u[0], grid, 1)

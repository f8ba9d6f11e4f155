"""Closed-form solutions and twilight-zone forcing.

Manufactured solutions are separable trigonometric products; every mixed
space/time derivative is available in closed form through the phase-shift
rule d/ds cos(f s + phi) = f cos(f s + phi + pi/2).  Substituting such a
solution into the governing equations defines residual forcing functions
which, injected into the schemes, make the chosen solution an exact
solution of the forced problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GridSpec
from .errors import InvalidParams, UnsupportedDerivative
from .materials import MaterialParams
from .stepper import ForcingSample

_MAX_DERIV = 8


@dataclass(frozen=True)
class TrigFactor:
    """cos(f*s + phi) in one coordinate, closed under differentiation."""

    f: float
    phi: float

    def eval(self, s, order: int = 0):
        if order < 0 or order > _MAX_DERIV:
            raise UnsupportedDerivative(f"derivative order {order}")
        return self.f**order * np.cos(self.f * s + self.phi
                                      + order * 0.5 * math.pi)


@dataclass(frozen=True)
class TrigProduct:
    """amp * prod_k cos(f_k x_k + phi_k) * cos(f_t t + phi_t)."""

    amp: float
    space: tuple  # one TrigFactor per axis
    time: TrigFactor

    def eval(self, coords, t, deriv=None):
        """Mixed derivative; deriv = (dx[, dy], dt), default zeroth order."""
        if deriv is None:
            deriv = (0,) * (len(self.space) + 1)
        if sum(deriv) > _MAX_DERIV:
            raise UnsupportedDerivative(f"total derivative order {sum(deriv)}")
        out = self.amp * self.time.eval(t, deriv[-1])
        for k, fac in enumerate(self.space):
            out = out * fac.eval(coords[k], deriv[k])
        return out


class _ZeroComponent:
    """Identically-zero stand-in with the TrigProduct interface."""

    def eval(self, coords, t, deriv=None):
        return 0.0


ZERO_COMPONENT = _ZeroComponent()


@dataclass(frozen=True)
class ManufacturedSolution:
    """Closed-form fields for every solution component.

    e: d components; p: (N_p, d) components; n: N_n components.
    The 2D E pair comes from a stream function, so div(E) = 0 exactly.
    """

    dim: int
    e: tuple
    p: tuple
    n: tuple


# Fixed frequency/phase table (amp, fx, phx, fy, phy, ft, pht).  Tangential
# (y) frequencies are integer multiples of 2*pi so every component is
# 1-periodic in y; entry 0 parameterizes the E stream function.  Changing
# any entry changes the recorded acceptance numbers.
FREQUENCY_TABLE = (
    (0.75, 2.30, 0.30, 2.0 * math.pi, 0.35, 2.60, 0.25),   # 0: stream psi
    (0.30, 2.10, 0.80, 2.0 * math.pi, 1.10, 2.20, 0.40),   # 1: P slots...
    (0.25, 2.70, 0.20, 2.0 * math.pi, 0.60, 3.10, 0.90),
    (0.28, 3.20, 1.30, 4.0 * math.pi, 0.25, 2.40, 0.15),
    (0.22, 2.90, 0.55, 2.0 * math.pi, 1.40, 2.90, 0.70),
    (0.26, 2.45, 1.05, 4.0 * math.pi, 0.85, 3.30, 0.35),
    (0.21, 3.05, 0.15, 2.0 * math.pi, 0.45, 2.05, 1.20),
    (0.24, 2.60, 0.95, 4.0 * math.pi, 1.25, 2.75, 0.55),
    (0.27, 3.40, 0.40, 2.0 * math.pi, 0.95, 3.05, 0.85),
    (0.23, 2.15, 1.45, 4.0 * math.pi, 0.15, 2.55, 0.10),
    (0.29, 2.85, 0.65, 2.0 * math.pi, 1.05, 3.45, 0.60),
    (0.20, 3.15, 1.15, 4.0 * math.pi, 0.55, 2.35, 1.00),
    (0.25, 2.50, 0.25, 2.0 * math.pi, 0.75, 2.95, 0.30),
    (0.24, 2.25, 0.85, 2.0 * math.pi, 0.30, 2.15, 0.75),   # 13: N slots...
    (0.22, 3.30, 0.35, 4.0 * math.pi, 1.20, 2.65, 0.20),
    (0.26, 2.75, 1.25, 2.0 * math.pi, 0.50, 3.20, 0.95),
    (0.21, 3.10, 0.10, 4.0 * math.pi, 0.90, 2.45, 0.50),
    (0.23, 2.40, 0.70, 2.0 * math.pi, 1.35, 3.35, 0.05),
    (0.27, 2.95, 1.40, 4.0 * math.pi, 0.20, 2.30, 1.10),
)

_P_SLOT0 = 1
_N_SLOT0 = 13


def _product_from_entry(entry, dim: int, amp_scale: float = 1.0,
                        phase_x_shift: float = 0.0) -> TrigProduct:
    amp, fx, phx, fy, phy, ft, pht = entry
    space = (TrigFactor(fx, phx + phase_x_shift),)
    if dim == 2:
        space = space + (TrigFactor(fy, phy),)
    return TrigProduct(amp * amp_scale, space, TrigFactor(ft, pht))


def default_manufactured(material: MaterialParams, dim: int,
                         variant: int = 0) -> ManufacturedSolution:
    """Deterministic manufactured solution for the given material shape.

    2D: E = (d psi/dy, -d psi/dx) for the table's stream function, hence
    exactly divergence free.  1D: E is the plain product of entry 0.
    P and N components take consecutive table slots (shifted by `variant`).
    """
    amp, fx, phx, fy, phy, ft, pht = FREQUENCY_TABLE[0]
    tfac = TrigFactor(ft, pht)
    if dim == 2:
        # Ex = dpsi/dy, Ey = -dpsi/dx: phase-shift rule applied once.
        ex = TrigProduct(amp * fy, (TrigFactor(fx, phx),
                                    TrigFactor(fy, phy + 0.5 * math.pi)), tfac)
        ey = TrigProduct(-amp * fx, (TrigFactor(fx, phx + 0.5 * math.pi),
                                     TrigFactor(fy, phy)), tfac)
        e = (ex, ey)
    else:
        e = (TrigProduct(amp, (TrigFactor(fx, phx),), tfac),)

    ntab = len(FREQUENCY_TABLE)
    p = []
    for m in range(material.num_polarization):
        comps = []
        for c in range(dim):
            slot = _P_SLOT0 + (2 * m + c + variant) % (ntab - _P_SLOT0)
            comps.append(_product_from_entry(FREQUENCY_TABLE[slot], dim))
        p.append(tuple(comps))
    n = []
    for loft in range(material.num_levels):
        slot = _N_SLOT0 + (loft + variant) % (ntab - _N_SLOT0)
        n.append(_product_from_entry(FREQUENCY_TABLE[slot], dim))
    return ManufacturedSolution(dim=dim, e=e, p=tuple(p), n=tuple(n))


def eval_exact(component, point, t: float, deriv=None):
    """Mixed derivative of one solution component at a point (or arrays)."""
    if np.ndim(point) == 0:
        point = (point,)
    return component.eval(tuple(point), t, deriv)


# ---------------------------------------------------------------------------
# soliton and Gaussian plane wave
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolitonParams:
    x0: float = 0.0
    U: float = 0.5
    eta: float = 1.0
    c: float = 1.0
    delta_hat: float = 0.1

    def __post_init__(self):
        if not (0.0 < self.U < 1.0):
            raise InvalidParams(f"U={self.U} must lie in (0, 1)")
        if self.delta_hat <= 0:
            raise InvalidParams("delta_hat must be positive")


def soliton_exact(params: SolitonParams, x, t):
    """Traveling-envelope solution (E, P, D) of the one-level system.

        E = 2 sqrt(eta U/(1-U)) sech(dh xi) sin(x - t)
        P = 2 dh tanh(dh xi) sech(dh xi) cos(x - t)
        D = 1 - 2 sech(dh xi)^2,    xi = x - x0 - U t
    """
    xi = np.asarray(x, dtype=float) - params.x0 - params.U * t
    arg = params.delta_hat * xi
    sech = 1.0 / np.cosh(arg)
    amp = 2.0 * math.sqrt(params.eta * params.U / (1.0 - params.U))
    e = amp * sech * np.sin(np.asarray(x) - t)
    p = 2.0 * params.delta_hat * np.tanh(arg) * sech * np.cos(np.asarray(x) - t)
    d = 1.0 - 2.0 * sech**2
    return e, p, d


def gaussian_plane_wave(x, t):
    """Modulated Gaussian pulse exp(-50 s^2) cos(4 pi s), s = x + 3 - t."""
    s = np.asarray(x, dtype=float) + 3.0 - t
    return np.exp(-50.0 * s**2) * np.cos(4.0 * math.pi * s)


# ---------------------------------------------------------------------------
# solution providers: fill field arrays at a requested time
# ---------------------------------------------------------------------------

class SolutionProvider:
    """Evaluates exact fields on grid coordinate arrays at a given time."""

    def eval_e(self, coords, t):
        raise NotImplementedError

    def eval_p(self, coords, t):
        raise NotImplementedError

    def eval_n(self, coords, t):
        raise NotImplementedError


class ZeroSolution(SolutionProvider):
    def __init__(self, material: MaterialParams, dim: int):
        self.material = material
        self.dim = dim

    def _zeros(self, coords, lead):
        shape = np.broadcast_shapes(*(np.shape(c) for c in coords))
        return np.zeros(lead + shape)

    def eval_e(self, coords, t):
        return self._zeros(coords, (self.dim,))

    def eval_p(self, coords, t):
        return self._zeros(coords, (self.material.num_polarization, self.dim))

    def eval_n(self, coords, t):
        return self._zeros(coords, (self.material.num_levels,))


class ManufacturedProvider(SolutionProvider):
    def __init__(self, solution: ManufacturedSolution):
        self.solution = solution

    def _stack(self, comps, coords, t):
        shape = np.broadcast_shapes(*(np.shape(c) for c in coords))
        out = np.zeros((len(comps),) + shape)
        for i, comp in enumerate(comps):
            out[i] = comp.eval(coords, t)
        return out

    def eval_e(self, coords, t):
        return self._stack(self.solution.e, coords, t)

    def eval_p(self, coords, t):
        sol = self.solution
        shape = np.broadcast_shapes(*(np.shape(c) for c in coords))
        out = np.zeros((len(sol.p), sol.dim) + shape)
        for m, comps in enumerate(sol.p):
            for c, comp in enumerate(comps):
                out[m, c] = comp.eval(coords, t)
        return out

    def eval_n(self, coords, t):
        return self._stack(self.solution.n, coords, t)


class SolitonProvider(SolutionProvider):
    """1D soliton fields mapped onto the one-level material's state.

    The stored polarization is (eta/c^2) times the reduced-system P and
    the single population density is D itself.
    """

    def __init__(self, params: SolitonParams):
        self.params = params
        self.p_scale = params.eta / params.c**2

    def eval_e(self, coords, t):
        e, _, _ = soliton_exact(self.params, coords[0], t)
        return np.asarray(e)[None, ...]

    def eval_p(self, coords, t):
        _, p, _ = soliton_exact(self.params, coords[0], t)
        return (self.p_scale * np.asarray(p))[None, None, ...]

    def eval_n(self, coords, t):
        _, _, d = soliton_exact(self.params, coords[0], t)
        return np.asarray(d)[None, ...]


class GaussianPlaneWaveProvider(SolutionProvider):
    """Pulse initial data: E from the plane wave, P = 0, N at rest levels."""

    def __init__(self, material: MaterialParams, dim: int, n_rest=None):
        self.material = material
        self.dim = dim
        if n_rest is None:
            n_rest = np.zeros(material.num_levels)
            if material.num_levels:
                n_rest[0] = 1.0
        self.n_rest = np.asarray(n_rest, dtype=float)

    def eval_e(self, coords, t):
        shape = np.broadcast_shapes(*(np.shape(c) for c in coords))
        out = np.zeros((self.dim,) + shape)
        # transverse component: Ey in 2D, the single component in 1D
        out[-1] = gaussian_plane_wave(coords[0], t)
        return out

    def eval_p(self, coords, t):
        shape = np.broadcast_shapes(*(np.shape(c) for c in coords))
        return np.zeros((self.material.num_polarization, self.dim) + shape)

    def eval_n(self, coords, t):
        shape = np.broadcast_shapes(*(np.shape(c) for c in coords))
        out = np.zeros((self.material.num_levels,) + shape)
        for i, v in enumerate(self.n_rest):
            out[i] = v
        return out


def initialize_from_solution(state, grid: GridSpec, provider: SolutionProvider,
                             dt: float):
    """Fill level n with the solution at t=0 and level n-1 at t=-dt.

    Ghost points are filled too, so the first step has valid stencil
    support everywhere.  N is set at t=0 only.
    """
    coords = grid.coords()
    state.E[1][...] = provider.eval_e(coords, 0.0)
    state.E[0][...] = provider.eval_e(coords, -dt)
    state.P[1][...] = provider.eval_p(coords, 0.0)
    state.P[0][...] = provider.eval_p(coords, -dt)
    state.N[0][...] = provider.eval_n(coords, 0.0)
    state.t = 0.0
    state.step_index = 0


# ---------------------------------------------------------------------------
# twilight-zone forcing
# ---------------------------------------------------------------------------

class _FactorCache:
    """Caches spatial factor arrays of a manufactured solution on one grid."""

    def __init__(self, grid: GridSpec):
        self.coords = grid.coords()
        self._cache: dict = {}

    def factor(self, fac: TrigFactor, axis: int, order: int):
        key = (fac, axis, order)
        arr = self._cache.get(key)
        if arr is None:
            arr = fac.eval(self.coords[axis], order)
            self._cache[key] = arr
        return arr


class ForcingEvaluator:
    """Twilight-zone forcing arrays for one (solution, material, grid).

    fe   = E_tt + (1/eps0) sum_m P_m,tt - c^2 Lap(E)
    fp_m = P_m,tt + b1 P_m,t + b0 P_m - sum_l a[m,l] N_l E
    fn_l = N_l,t - sum_k alpha[l,k] N_k - sum_m beta[l,m] E . P_m,t
    plus their time/space derivatives needed at fourth order, all exact.
    """

    def __init__(self, solution: ManufacturedSolution,
                 material: MaterialParams, grid: GridSpec,
                 with_gradients: bool = False):
        self.sol = solution
        self.mat = material
        self.grid = grid
        self.dim = grid.dim
        self.with_gradients = with_gradients
        self._cache = _FactorCache(grid)

    # -- closed-form pieces -------------------------------------------------

    def _d(self, tp, t: float, dx=0, dy=0, dt=0):
        """Derivative of one component on the grid at time t."""
        if isinstance(tp, _ZeroComponent):
            return 0.0
        if self.dim == 1:
            spatial = (dx,)
            if dy:
                return 0.0
        else:
            spatial = (dx, dy)
        space_part = 1.0
        for k, fac in enumerate(tp.space):
            space_part = space_part * self._cache.factor(fac, k, spatial[k])
        return tp.amp * space_part * tp.time.eval(t, dt)

    def _lap(self, tp, t: float, dt=0):
        out = self._d(tp, t, dx=2, dt=dt)
        if self.dim == 2:
            out = out + self._d(tp, t, dy=2, dt=dt)
        return out

    def _lap_sq(self, tp, t: float):
        out = self._d(tp, t, dx=4)
        if self.dim == 2:
            out = out + 2.0 * self._d(tp, t, dx=2, dy=2) + self._d(tp, t, dy=4)
        return out

    def _prod_dt(self, u, v, t: float, order: int):
        """d^order/dt^order (u*v) by Leibniz."""
        out = 0.0
        for i in range(order + 1):
            out = out + math.comb(order, i) * self._d(u, t, dt=i) \
                * self._d(v, t, dt=order - i)
        return out

    def _prod_lap(self, u, v, t: float):
        """Lap(u*v) = u_xx v + 2 u_x v_x + u v_xx (+ y part)."""
        out = (self._d(u, t, dx=2) * self._d(v, t)
               + 2.0 * self._d(u, t, dx=1) * self._d(v, t, dx=1)
               + self._d(u, t) * self._d(v, t, dx=2))
        if self.dim == 2:
            out = out + (self._d(u, t, dy=2) * self._d(v, t)
                         + 2.0 * self._d(u, t, dy=1) * self._d(v, t, dy=1)
                         + self._d(u, t) * self._d(v, t, dy=2))
        return out

    # -- assembled forcing ---------------------------------------------------

    def sample(self, t: float, order: int) -> ForcingSample:
        mat, sol = self.mat, self.sol
        d = self.dim
        shape = self.grid.shape
        fs = ForcingSample.zeros(mat.num_polarization, mat.num_levels, d,
                                 shape, gradients=self.with_gradients)
        ap, csq = mat.alpha_p, mat.c**2

        for c in range(d):
            ec = sol.e[c]
            ptt = sum(self._d(sol.p[m][c], t, dt=2)
                      for m in range(mat.num_polarization))
            fs.fe[c] = self._d(ec, t, dt=2) + ap * ptt - csq * self._lap(ec, t)
            if order == 4:
                pttt = sum(self._d(sol.p[m][c], t, dt=3)
                           for m in range(mat.num_polarization))
                ptttt = sum(self._d(sol.p[m][c], t, dt=4)
                            for m in range(mat.num_polarization))
                lap_ptt = sum(self._lap(sol.p[m][c], t, dt=2)
                              for m in range(mat.num_polarization))
                fs.fet[c] = (self._d(ec, t, dt=3) + ap * pttt
                             - csq * self._lap(ec, t, dt=1))
                fs.fett[c] = (self._d(ec, t, dt=4) + ap * ptttt
                              - csq * self._lap(ec, t, dt=2))
                fs.lapfe[c] = (self._lap(ec, t, dt=2) + ap * lap_ptt
                               - csq * self._lap_sq(ec, t))
            if self.with_gradients:
                for ax, slot in ((0, fs.fex), (1, fs.fey)):
                    if ax >= d:
                        continue
                    kw = {"dx": 1} if ax == 0 else {"dy": 1}
                    ptt_ax = sum(self._d(sol.p[m][c], t, dt=2, **kw)
                                 for m in range(mat.num_polarization))
                    lap_ax = self._d(ec, t, dx=kw.get("dx", 0) + 2,
                                     dy=kw.get("dy", 0))
                    if d == 2:
                        lap_ax = lap_ax + self._d(ec, t, dx=kw.get("dx", 0),
                                                  dy=kw.get("dy", 0) + 2)
                    slot[c] = (self._d(ec, t, dt=2, **kw) + ap * ptt_ax
                               - csq * lap_ax)

        for m in range(mat.num_polarization):
            b0m, b1m = mat.b0[m], mat.b1[m]
            for c in range(d):
                pmc, ec = sol.p[m][c], sol.e[c]
                ne = sum(mat.a[m, loft] * self._d(sol.n[loft], t)
                         for loft in range(mat.num_levels)) * self._d(ec, t)
                fs.fp[m, c] = (self._d(pmc, t, dt=2) + b1m * self._d(pmc, t, dt=1)
                               + b0m * self._d(pmc, t) - ne)
                if order == 4:
                    ne_t = sum(mat.a[m, loft]
                               * self._prod_dt(sol.n[loft], ec, t, 1)
                               for loft in range(mat.num_levels))
                    ne_tt = sum(mat.a[m, loft]
                                * self._prod_dt(sol.n[loft], ec, t, 2)
                                for loft in range(mat.num_levels))
                    ne_lap = sum(mat.a[m, loft]
                                 * self._prod_lap(sol.n[loft], ec, t)
                                 for loft in range(mat.num_levels))
                    fs.fpt[m, c] = (self._d(pmc, t, dt=3)
                                    + b1m * self._d(pmc, t, dt=2)
                                    + b0m * self._d(pmc, t, dt=1) - ne_t)
                    fs.fptt[m, c] = (self._d(pmc, t, dt=4)
                                     + b1m * self._d(pmc, t, dt=3)
                                     + b0m * self._d(pmc, t, dt=2) - ne_tt)
                    fs.lapfp[m, c] = (self._lap(pmc, t, dt=2)
                                      + b1m * self._lap(pmc, t, dt=1)
                                      + b0m * self._lap(pmc, t) - ne_lap)

        for loft in range(mat.num_levels):
            nl = sol.n[loft]
            relax = [sum(mat.alpha[loft, k] * self._d(sol.n[k], t, dt=i)
                         for k in range(mat.num_levels))
                     for i in range(4)]

            def dot_dt(i, loft=loft):
                """d^i/dt^i of sum_m beta[loft,m] E . P_m,t"""
                out = 0.0
                for m in range(mat.num_polarization):
                    for c in range(d):
                        term = 0.0
                        for j in range(i + 1):
                            term = term + math.comb(i, j) \
                                * self._d(sol.e[c], t, dt=j) \
                                * self._d(sol.p[m][c], t, dt=i - j + 1)
                        out = out + mat.beta[loft, m] * term
                return out

            fs.fn[loft] = self._d(nl, t, dt=1) - relax[0] - dot_dt(0)
            fs.fnt[loft] = self._d(nl, t, dt=2) - relax[1] - dot_dt(1)
            if order == 4:
                fs.fntt[loft] = self._d(nl, t, dt=3) - relax[2] - dot_dt(2)
                fs.fnttt[loft] = self._d(nl, t, dt=4) - relax[3] - dot_dt(3)
        return fs


def mms_forcing(solution: ManufacturedSolution, material: MaterialParams,
                grid: GridSpec, t: float, order: int,
                with_gradients: bool = False) -> ForcingSample:
    """One-shot forcing evaluation (prefer ForcingEvaluator in loops)."""
    return ForcingEvaluator(solution, material, grid,
                            with_gradients=with_gradients).sample(t, order)

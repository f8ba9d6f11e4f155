"""Error norms, convergence rates, conservation and energy diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import FieldState
from .errors import DegenerateInput, GridsNotNested, PairingMismatch
from .materials import MaterialParams
from .solutions import SolutionProvider

AT_FLOOR = float("nan")  # reported rate when errors hit the rounding floor


def max_norm_error(state: FieldState, provider: SolutionProvider, t: float,
                   fields: str = "E") -> float:
    """Max over interior points and components of |computed - exact|.

    fields: any subset of "EPN", e.g. "E" or "EPN".
    """
    grid = state.grid
    interior = grid.interior
    coords = []
    for k, c in enumerate(grid.coords()):
        sl = [slice(None)] * grid.dim
        sl[k] = interior[k]
        coords.append(c[tuple(sl)])
    err = 0.0
    lead = (slice(None),)
    if "E" in fields:
        exact = provider.eval_e(coords, t)
        err = max(err, float(np.max(np.abs(
            state.E[1][lead + interior] - exact))))
    if "P" in fields:
        exact = provider.eval_p(coords, t)
        err = max(err, float(np.max(np.abs(
            state.P[1][(slice(None), slice(None)) + interior] - exact))))
    if "N" in fields:
        exact = provider.eval_n(coords, t)
        err = max(err, float(np.max(np.abs(
            state.N[0][lead + interior] - exact))))
    return err


def convergence_rate(errors) -> list[float]:
    """Pairwise rates log(e_k/e_{k+1}) / log(h_k/h_{k+1}).

    errors: sequence of (h, err) with h strictly decreasing, err > 0.
    """
    if len(errors) < 2:
        raise DegenerateInput("need at least two (h, err) pairs")
    rates = []
    for (h0, e0), (h1, e1) in zip(errors, errors[1:]):
        if not h1 < h0:
            raise DegenerateInput("h must be strictly decreasing")
        if e0 <= 0 or e1 <= 0:
            raise DegenerateInput("error at floor")
        rates.append(math.log(e0 / e1) / math.log(h0 / h1))
    return rates


def restrict_to_common(u_fine: np.ndarray, ratio: int, dim: int) -> np.ndarray:
    """Sample a fine-grid interior array at the points of a coarser grid."""
    sl = [slice(None)] * (u_fine.ndim - dim)
    sl += [slice(0, None, ratio)] * dim
    return u_fine[tuple(sl)]


def self_convergence(u_h: np.ndarray, u_h2: np.ndarray, u_h4: np.ndarray,
                     dim: int):
    """Estimated error and rate from solutions on h, h/2, h/4 grids.

    Arrays hold interior values only.  e1 = ||u_h - u_{h/2}||_inf and
    e2 = ||u_{h/2} - u_{h/4}||_inf on the h-grid and h/2-grid points;
    rate = log2(e1/e2).
    """
    spatial = lambda a: a.shape[a.ndim - dim:]
    for coarse, fine in ((u_h, u_h2), (u_h2, u_h4)):
        for nc, nf in zip(spatial(coarse), spatial(fine)):
            if nf != 2 * (nc - 1) + 1:
                raise GridsNotNested(
                    f"extents {nc} and {nf} are not nested refinements")
    e1 = float(np.max(np.abs(u_h - restrict_to_common(u_h2, 2, dim))))
    e2 = float(np.max(np.abs(u_h2 - restrict_to_common(u_h4, 2, dim))))
    if e1 == 0.0 or e2 == 0.0:
        return (e1, AT_FLOOR)
    return (e1, math.log2(e1 / e2))


def population_sum(state: FieldState):
    """Pointwise sum over levels of N on the interior."""
    interior = state.grid.interior
    return np.sum(state.N[0][(slice(None),) + interior], axis=0)


def population_deviation(state: FieldState, sum0: np.ndarray) -> float:
    """Max pointwise |sum N(t) - sum N(0)|."""
    return float(np.max(np.abs(population_sum(state) - sum0)))


@dataclass(frozen=True)
class Transition:
    """One paired two-level transition (i low, j high)."""

    level_low: int
    level_high: int
    omega: float
    kappa: float
    gamma: float
    hbar_omega: float


class EnergyPairing:
    """Transition pairing for the quadratic P/N energy functional.

    Validates, per paired polarization m <-> transition ji:
        b1[m] = gamma_ji, b0[m] = omega_ji^2,
        a[m, i] = kappa_ji = -a[m, j],
        beta[i, m] = -1/(hbar omega_ji) = -beta[j, m].
    Derived: K = sum kappa*hbar*omega, delta_ji = K/(kappa*hbar*omega).
    """

    def __init__(self, material: MaterialParams, transitions):
        self.material = material
        self.transitions = tuple(transitions)
        if len(self.transitions) != material.num_polarization:
            raise PairingMismatch("one transition per polarization required")
        tol = 1e-12
        for m, tr in enumerate(self.transitions):
            if tr.kappa <= 0 or tr.omega <= 0 or tr.gamma < 0:
                raise PairingMismatch("kappa, omega must be > 0; gamma >= 0")
            checks = (
                (material.b1[m], tr.gamma),
                (material.b0[m], tr.omega**2),
                (material.a[m, tr.level_low], tr.kappa),
                (material.a[m, tr.level_high], -tr.kappa),
                (material.beta[tr.level_low, m], -1.0 / tr.hbar_omega),
                (material.beta[tr.level_high, m], 1.0 / tr.hbar_omega),
            )
            for got, want in checks:
                if abs(got - want) > tol * max(1.0, abs(want)):
                    raise PairingMismatch(
                        f"transition {m}: material coefficient {got} != {want}")
        self.K = sum(tr.kappa * tr.hbar_omega for tr in self.transitions)
        self.delta = tuple(self.K / (tr.kappa * tr.hbar_omega)
                           for tr in self.transitions)


def energy_pn(state: FieldState, pairing: EnergyPairing, dt: float,
              pt: np.ndarray | None = None) -> float:
    """Quadratic P/N energy with trapezoid-on-grid quadrature:

        E_PN = sum_ji delta_ji (1/2 ||P_ji,t||^2 + 1/2 w_ji^2 ||P_ji||^2)
               + K/2 ||N||^2

    P_t defaults to the centered difference across stored levels; pass
    `pt` to use a higher-order estimate (shape like one P level).
    """
    if pairing.material is not state.material \
            and pairing.material != state.material:
        raise PairingMismatch("pairing was built for a different material")
    grid = state.grid
    interior = grid.interior
    cell = float(np.prod(grid.h))
    # trapezoid weights: half on faces, quarter on corners
    w = np.ones(tuple(s.stop - s.start for s in interior))
    for ax in range(grid.dim):
        sl0 = [slice(None)] * grid.dim
        sl0[ax] = 0
        sl1 = [slice(None)] * grid.dim
        sl1[ax] = -1
        w[tuple(sl0)] *= 0.5
        w[tuple(sl1)] *= 0.5

    if pt is None:
        pt = (state.P[2] - state.P[0]) / (2.0 * dt)
    total = 0.0
    for m, tr in enumerate(pairing.transitions):
        ptm = pt[m][(slice(None),) + interior]
        pm = state.P[1][m][(slice(None),) + interior]
        total += pairing.delta[m] * 0.5 * float(
            np.sum(w * np.sum(ptm**2, axis=0))
            + tr.omega**2 * np.sum(w * np.sum(pm**2, axis=0))) * cell
    nn = state.N[0][(slice(None),) + interior]
    total += 0.5 * pairing.K * float(np.sum(w * np.sum(nn**2, axis=0))) * cell
    return total

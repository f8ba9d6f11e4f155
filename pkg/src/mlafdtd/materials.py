"""Multi-level atomic (MLA) material parameters.

A material couples Maxwell's equations in second-order form to a set of
polarization oscillators and atomic population densities:

    E_tt = c^2 Lap(E) - (1/eps0) sum_m P_m,tt
    P_m,tt + b1[m] P_m,t + b0[m] P_m = sum_l a[m,l] N_l E
    N_l,t = sum_k alpha[l,k] N_k + sum_m beta[l,m] E . P_m,t

All coefficients are real and given in normalized units.  The built-in
materials transcribe the tables shipped with the solver's validation suite.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonPositivePhysical, UnknownMaterial


@dataclass(frozen=True)
class MaterialParams:
    """Validated MLA coefficients plus derived constants.

    Attributes:
        num_polarization: number of polarization vectors (N_p >= 0).
        num_levels: number of atomic levels (N_n >= 0).
        eps0, mu0: permittivity / permeability, both > 0.
        a: (N_p, N_n) coupling coefficients a[m, l].
        b0: (N_p,) restoring coefficients.
        b1: (N_p,) damping coefficients.
        alpha: (N_n, N_n) relaxation matrix (1/time).
        beta: (N_n, N_p) energy exchange coefficients.
        c: wave speed 1/sqrt(eps0*mu0).
        alpha_p: polarization coupling 1/eps0.
    """

    num_polarization: int
    num_levels: int
    eps0: float
    mu0: float
    a: np.ndarray
    b0: np.ndarray
    b1: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    name: str = "custom"
    c: float = field(init=False, default=0.0)
    alpha_p: float = field(init=False, default=0.0)

    def __post_init__(self):
        if self.eps0 <= 0 or self.mu0 <= 0:
            raise NonPositivePhysical(
                f"eps0={self.eps0}, mu0={self.mu0} must both be positive")
        np_, nn = self.num_polarization, self.num_levels
        if np_ < 0 or nn < 0:
            raise DimensionMismatch("negative polarization/level count")
        shapes = {
            "a": (self.a, (np_, nn)),
            "b0": (self.b0, (np_,)),
            "b1": (self.b1, (np_,)),
            "alpha": (self.alpha, (nn, nn)),
            "beta": (self.beta, (nn, np_)),
        }
        for key, (arr, want) in shapes.items():
            if arr.shape != want:
                raise DimensionMismatch(
                    f"{key} has shape {arr.shape}, expected {want}")
            if not np.all(np.isfinite(arr)):
                raise NonPositivePhysical(f"{key} contains non-finite entries")
        object.__setattr__(self, "c", 1.0 / math.sqrt(self.eps0 * self.mu0))
        object.__setattr__(self, "alpha_p", 1.0 / self.eps0)


def build_material(raw: dict | MaterialParams) -> MaterialParams:
    """Validate raw coefficients and attach derived constants.

    Accepts either an existing MaterialParams (idempotent) or a dict with
    keys mirroring the MaterialParams fields.
    """
    if isinstance(raw, MaterialParams):
        return raw
    try:
        np_ = int(raw["numPolarization"])
        nn = int(raw["numLevels"])
        mat = MaterialParams(
            num_polarization=np_,
            num_levels=nn,
            eps0=float(raw["eps0"]),
            mu0=float(raw["mu0"]),
            a=np.asarray(raw["a"], dtype=float).reshape(np_, nn),
            b0=np.asarray(raw["b0"], dtype=float).reshape(np_),
            b1=np.asarray(raw["b1"], dtype=float).reshape(np_),
            alpha=np.asarray(raw["alpha"], dtype=float).reshape(nn, nn),
            beta=np.asarray(raw["beta"], dtype=float).reshape(nn, np_),
            name=str(raw.get("name", "custom")),
        )
    except KeyError as exc:
        raise DimensionMismatch(f"missing material key: {exc}") from exc
    except ValueError as exc:
        raise DimensionMismatch(str(exc)) from exc
    return mat


def load_material_file(path: str) -> MaterialParams:
    """Load a material from a JSON file with MaterialParams-mirroring keys."""
    with open(path) as fh:
        return build_material(json.load(fh))


# Relaxation matrix shared by the two four-level materials.  The printed
# tables round alpha[3][3]; the structural value is -(alpha[0][3]+alpha[2][3])
# so that every column sums to zero, which is what makes sum_l N_l exactly
# conserved by the discrete schemes.
_ALPHA_4LEVEL = np.array([
    [0.0, 0.0010542, 0.0, 0.000000012723],
    [0.0, -0.0010542, 0.0000014641, 0.0],
    [0.0, 0.0, -0.0000014641, 0.0012299],
    [0.0, 0.0, 0.0, -(0.0012299 + 0.000000012723)],
])


def _mla_mat2() -> MaterialParams:
    return MaterialParams(
        num_polarization=2, num_levels=4, eps0=1.0, mu0=1.0,
        a=np.array([[2.3418, 0.0, 0.0, 2.3418],
                    [0.0, 11.666, 11.666, 0.0]]),
        b0=np.array([1.0, 1.0]),
        b1=np.array([0.1, 0.1]),
        alpha=_ALPHA_4LEVEL.copy(),
        beta=np.array([[-2.3418, 0.0],
                       [0.0, -2.4362],
                       [0.0, 2.4362],
                       [2.3418, 0.0]]),
        name="mlaMat2",
    )


def _mla_mat3() -> MaterialParams:
    return MaterialParams(
        num_polarization=1, num_levels=1, eps0=2.0, mu0=1.0,
        a=np.array([[10.0]]),
        b0=np.array([1.0]),
        b1=np.array([0.0]),
        alpha=np.array([[0.01]]),
        beta=np.array([[1.0]]),
        name="mlaMat3",
    )


def _mla_mat4levels() -> MaterialParams:
    # b matrix read row-per-polarization as (b0, b1).
    return MaterialParams(
        num_polarization=2, num_levels=4, eps0=2.0, mu0=1.0,
        a=np.array([[2.3418, 0.0, 0.0, -2.3418],
                    [0.0, 11.666, -11.666, 0.0]]),
        b0=np.array([769.2308, 710.8037]),
        b1=np.array([64.0180, 152.1820]),
        alpha=_ALPHA_4LEVEL.copy(),
        beta=np.array([[-1801.421965974931, 0.0],
                       [0.0, -1873.997239424281],
                       [0.0, 1873.997239424281],
                       [1801.421965974931, 0.0]]),
        name="mlaMat4levels",
    )


def _vacuum() -> MaterialParams:
    """Linear lossless limit: one inert oscillator that never couples to E."""
    return MaterialParams(
        num_polarization=1, num_levels=1, eps0=1.0, mu0=1.0,
        a=np.zeros((1, 1)), b0=np.zeros(1), b1=np.zeros(1),
        alpha=np.zeros((1, 1)), beta=np.zeros((1, 1)),
        name="vacuum",
    )


_BUILTINS = {
    "mlaMat2": _mla_mat2,
    "mlaMat3": _mla_mat3,
    "mlaMat4levels": _mla_mat4levels,
    "vacuum": _vacuum,
}


def builtin_material(name: str) -> MaterialParams:
    """Return one of the registered materials by name."""
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise UnknownMaterial(
            f"unknown material {name!r}; known: {sorted(_BUILTINS)}") from None
    return factory()


def builtin_names() -> list[str]:
    return sorted(_BUILTINS)


def soliton_material(eta: float = 1.0, c: float = 1.0,
                     delta_hat: float = 0.1) -> MaterialParams:
    """One-polarization, one-level material realizing the soliton system.

    The reduced system
        E_tt - c^2 Lap(E) = -eta P_tt
        P_tt + P          = delta_hat^2 D E
        D_t               = -E P_t
    is an MLA material with N identified with D, unit mu0, eps0 = 1/c^2,
    and the polarization stored as (eta/c^2) * P.  With eta = c = 1 the
    stored fields coincide with (E, P, D).
    """
    s = eta / c**2
    return MaterialParams(
        num_polarization=1, num_levels=1, eps0=1.0 / c**2, mu0=1.0,
        a=np.array([[s * delta_hat**2]]),
        b0=np.array([1.0]), b1=np.array([0.0]),
        alpha=np.array([[0.0]]),
        beta=np.array([[-1.0 / s]]),
        name="solitonOneLevel",
    )

import numpy as np
import pytest

from mlafdtd.core import DomainConfig, FieldState, GridSpec, SimulationConfig
from mlafdtd.materials import MaterialParams, builtin_material


@pytest.fixture
def grid1d():
    return GridSpec(dim=1, lo=(0.0,), hi=(1.0,), n=(40,), n_ghost=2)


@pytest.fixture
def grid2d():
    return GridSpec(dim=2, lo=(0.0, 0.0), hi=(1.0, 1.0), n=(20, 20), n_ghost=3)


@pytest.fixture
def mla3():
    return builtin_material("mlaMat3")


@pytest.fixture
def mla2():
    return builtin_material("mlaMat2")


def decoupled_material(num_p=1, num_n=1, eps0=1.0, mu0=1.0, b0=0.0, b1=0.0):
    """Material whose P and N never couple to E (a = beta = 0)."""
    return MaterialParams(
        num_polarization=num_p, num_levels=num_n, eps0=eps0, mu0=mu0,
        a=np.zeros((num_p, num_n)), b0=np.full(num_p, float(b0)),
        b1=np.full(num_p, float(b1)), alpha=np.zeros((num_n, num_n)),
        beta=np.zeros((num_n, num_p)), name="decoupled")


def single_domain_cfg(material, order=2, dim=2, n=20, solution="manufactured",
                      t_final=0.25, cfl=0.9, steps=None, lo=None, hi=None,
                      bc=None, **extra):
    lo = lo or ((0.0,) * dim)
    hi = hi or ((1.0,) * dim)
    if bc is None:
        if dim == 2:
            bc = (("dirichlet-exact", "dirichlet-exact"),
                  ("periodic", "periodic"))
        else:
            bc = (("dirichlet-exact", "dirichlet-exact"),)
    nn = (n,) * dim if np.isscalar(n) else tuple(n)
    return SimulationConfig(
        order=order, dim=dim,
        domains=[DomainConfig(material=material, lo=lo, hi=hi, n=nn, bc=bc)],
        solution=solution, cfl=cfl, t_final=t_final, steps=steps, **extra)


def two_domain_cfg(m1, m2, order=2, n=10, t_final=0.25, cfl=0.9,
                   solution="manufactured"):
    """Two unit squares meeting at x = 0, tangentially periodic."""
    return SimulationConfig(
        order=order, dim=2,
        domains=[
            DomainConfig(material=m1, lo=(-1.0, 0.0), hi=(0.0, 1.0),
                         n=(n, n),
                         bc=(("dirichlet-exact", "interface"),
                             ("periodic", "periodic"))),
            DomainConfig(material=m2, lo=(0.0, 0.0), hi=(1.0, 1.0),
                         n=(n, n),
                         bc=(("interface", "dirichlet-exact"),
                             ("periodic", "periodic")))],
        solution=solution, cfl=cfl, t_final=t_final, interface_axis=0)


def constant_state(grid, material, e=0.0, p=0.0, n=0.0):
    st = FieldState(grid, material)
    st.E[0][...] = e
    st.E[1][...] = e
    st.P[0][...] = p
    st.P[1][...] = p
    st.N[0][...] = n
    return st

import math

import numpy as np
import pytest

from mlafdtd.errors import (DimensionMismatch, NonPositivePhysical,
                            UnknownMaterial)
from mlafdtd.materials import (build_material, builtin_material,
                               soliton_material)


def raw_mla3():
    return {
        "numPolarization": 1, "numLevels": 1, "eps0": 2.0, "mu0": 1.0,
        "a": [[10.0]], "b0": [1.0], "b1": [0.0],
        "alpha": [[0.01]], "beta": [[1.0]],
    }


def test_build_material_accepts_valid_and_derives_constants():
    m = build_material(raw_mla3())
    assert m.c == pytest.approx(1.0 / math.sqrt(2.0), abs=0, rel=1e-15)
    assert m.alpha_p == pytest.approx(0.5)


def test_build_material_shape_mismatch():
    bad = raw_mla3()
    bad["a"] = [[1.0], [2.0]]  # 2x1 but numPolarization=1
    with pytest.raises(DimensionMismatch):
        build_material(bad)


def test_build_material_nonpositive_eps():
    bad = raw_mla3()
    bad["eps0"] = 0.0
    with pytest.raises(NonPositivePhysical):
        build_material(bad)


def test_build_material_idempotent():
    m = build_material(raw_mla3())
    assert build_material(m) is m


def test_builtin_mla_mat2_values():
    m = builtin_material("mlaMat2")
    assert m.num_polarization == 2 and m.num_levels == 4
    assert m.eps0 == 1.0 and m.mu0 == 1.0
    assert m.a[0][0] == 2.3418
    assert m.a[1][1] == 11.666
    assert m.alpha[0][1] == 0.0010542
    assert m.beta[3][0] == 2.3418
    assert m.b0[0] == 1.0 and m.b1[0] == 0.1


def test_builtin_mla_mat4levels_values():
    m = builtin_material("mlaMat4levels")
    assert m.eps0 == 2.0
    assert np.allclose(m.b0, [769.2308, 710.8037])
    assert np.allclose(m.b1, [64.0180, 152.1820])
    assert m.beta[0][0] == -1801.421965974931
    assert m.a[0][3] == -2.3418


def test_mla_mat4levels_column_sums_vanish():
    # this structure is what conserves sum_l N_l in the discrete schemes
    m = builtin_material("mlaMat4levels")
    assert np.allclose(m.alpha.sum(axis=0), 0.0, atol=1e-18)
    assert np.allclose(m.beta.sum(axis=0), 0.0, atol=1e-12)


def test_unknown_material():
    with pytest.raises(UnknownMaterial):
        builtin_material("nosuch")


def test_soliton_material_realizes_reduced_system():
    # eta = c = 1: P_tt + P = dh^2 N E and N_t = -E P_t
    m = soliton_material(1.0, 1.0, 0.1)
    assert m.eps0 == 1.0
    assert m.a[0, 0] == pytest.approx(0.01)
    assert m.beta[0, 0] == pytest.approx(-1.0)
    assert m.b0[0] == 1.0 and m.b1[0] == 0.0 and m.alpha[0, 0] == 0.0

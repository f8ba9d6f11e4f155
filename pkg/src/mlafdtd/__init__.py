"""FDTD solver for Maxwell's equations in second-order form coupled to
nonlinear multi-level atomic media, with single-step modified-equation
time stepping at orders 2 and 4 and planar material-interface coupling."""

from .core import (FieldState, GridSpec, SimulationConfig, compute_time_step,
                   config_from_dict, load_config)
from .materials import (MaterialParams, build_material, builtin_material,
                        builtin_names, soliton_material)

__all__ = [
    "FieldState", "GridSpec", "SimulationConfig", "compute_time_step",
    "config_from_dict", "load_config", "MaterialParams", "build_material",
    "builtin_material", "builtin_names", "soliton_material",
]

__version__ = "0.1.0"

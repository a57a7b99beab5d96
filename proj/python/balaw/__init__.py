"""Front tracking and operator splitting for 1D balance laws with nonlocal sources."""

from ._core import (
    ConfigError,
    Constants,
    Error,
    InvalidArgument,
    LeftDomain,
    NotInDomain,
    NumericalError,
    Profile,
    Source,
    System,
    UnknownPreset,
    UnknownSuite,
    calibrate,
    compose_psi,
    converge,
    euler_polygonal,
    homogeneous_flow,
    interaction_potential,
    l1_distance,
    presets,
    psi_states,
    run,
    solve_riemann,
    stability_functional,
    suite_names,
    upsilon,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

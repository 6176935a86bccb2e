"""Matrix-free TALA mantle convection on a blended 2D annulus."""

from ._tala import (
    BDF2Coefficients,
    ConfigError,
    DimensionlessNumbers,
    ExpSurrogate,
    ReferenceConstants,
    RunConfig,
    SolverFailure,
    bdf2_coefficients,
    load_config,
    manufactured_error,
    nondimensionalize,
    parse_config,
    run_convergence_test,
    run_simulation,
    run_solver_bench,
)

__all__ = [
    "BDF2Coefficients",
    "ConfigError",
    "DimensionlessNumbers",
    "ExpSurrogate",
    "ReferenceConstants",
    "RunConfig",
    "SolverFailure",
    "bdf2_coefficients",
    "load_config",
    "manufactured_error",
    "nondimensionalize",
    "parse_config",
    "run_convergence_test",
    "run_simulation",
    "run_solver_bench",
]

"""Trace-regularized PINN experiments on the unit disk (C++ core)."""

from ._trpinn import (
    ConfigError,
    DataError,
    DomainError,
    Error,
    FourierSeries,
    Mlp,
    NumericalError,
    StructuralError,
    boundary_value,
    build_m,
    discrete_seminorm,
    fit_fourier,
    jacobi_eigen,
    m_eigenvalues,
    mollify_demo,
    ntk,
    parse_config,
    seminorm_check,
    seminorm_midpoint,
    spectrum_compare,
    sqrt_profile_seminorm_exact,
    train,
)

__all__ = [name for name in dir() if not name.startswith("_")]

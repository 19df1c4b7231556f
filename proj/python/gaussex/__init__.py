"""Gaussian extremes toolkit: Python front end to the C++ core."""

from ._gaussex import (
    DomainError,
    Error,
    ModelError,
    NotPositiveDefinite,
    ParseError,
    UsageError,
    __version__,
    chi_formula,
    compare,
    config_hash,
    covariance_matrix,
    fbm_covariance,
    h_w,
    known_constant,
    normalize_config,
    perf_formula,
    pickands,
    piterbarg,
    psi,
    sample_paths,
    subfbm_covariance,
    wilson_interval,
)

__all__ = [name for name in dir() if not name.startswith("_")]

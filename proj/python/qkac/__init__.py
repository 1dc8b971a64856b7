"""Finite-N mean-field kinetics: exchangeable states, chaos metrics and dynamics."""

from ._core import (
    QkacError,
    chaos_distance,
    empirical_variance,
    evolve_exact,
    factorization_error,
    format_config,
    herm_eigen,
    integrate_hartree,
    marginal,
    operator_norm,
    partial_trace,
    random_density,
    random_hermitian,
    run_experiment,
    tensor_power,
    trace_norm,
)

from ._core import __version__

__all__ = [
    "QkacError",
    "chaos_distance",
    "empirical_variance",
    "evolve_exact",
    "factorization_error",
    "format_config",
    "herm_eigen",
    "integrate_hartree",
    "marginal",
    "operator_norm",
    "partial_trace",
    "random_density",
    "random_hermitian",
    "run_experiment",
    "tensor_power",
    "trace_norm",
]

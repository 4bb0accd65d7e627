"""Finite spectral models, spherical partial sums and their maximal function.

Builds discrete eigenfunction expansions for Dirichlet, Hermite and
Schrodinger operators on 1-D grids, evaluates S_R(L)f and sup_R |S_R(L)f|,
and checks the associated maximal, Plancherel-type and eigenvalue-counting
inequalities numerically.
"""

__version__ = "0.1.0"

from .config import Tolerances, DEFAULT_TOLERANCES
from .errors import ConfigurationError, NumericalError, StructuralError, DomainError
from .grid import Grid1D, GridFunction, Window, uniform_grid, inner_product, norm_on_window
from .eigensolve import TridiagonalMatrix, EigenPairs, sturm_count, eigen_range, lowest_eigenpairs
from .operators import (
    SpectralModel,
    PotentialSpec,
    build_dirichlet_1d,
    build_hermite_1d,
    build_schrodinger_fd,
    validate_growth_conditions,
)
from .spectral import (
    SpectralCoefficients,
    BandFilter,
    analyze,
    synthesize,
    partial_sum,
    apply_multiplier,
    maximal_function,
    band_projector,
    log_weighted_norm,
)

__all__ = [
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "ConfigurationError",
    "NumericalError",
    "StructuralError",
    "DomainError",
    "Grid1D",
    "GridFunction",
    "Window",
    "uniform_grid",
    "inner_product",
    "norm_on_window",
    "TridiagonalMatrix",
    "EigenPairs",
    "sturm_count",
    "eigen_range",
    "lowest_eigenpairs",
    "SpectralModel",
    "PotentialSpec",
    "build_dirichlet_1d",
    "build_hermite_1d",
    "build_schrodinger_fd",
    "validate_growth_conditions",
    "SpectralCoefficients",
    "BandFilter",
    "analyze",
    "synthesize",
    "partial_sum",
    "apply_multiplier",
    "maximal_function",
    "band_projector",
    "log_weighted_norm",
]

from .blocking import (
    DyadicBlocking,
    blocking_constant_check,
    blocking_constants,
    intrablock_maximal_check,
    intrablock_sum,
    make_dyadic_blocking,
)
from .counting import (
    eigencount_condition_check,
    phase_space_check,
    phase_space_volume,
    weyl_check,
    weyl_count,
)
from .maximal import maximal_inequality_check, maximal_ratio
from .plancherel import localized_multiplier_norm, plancherel_check, power_iteration
from .potentials import (
    bump_quotient,
    coulomb_integral,
    hardy_check,
    near_extremal_family,
    radial_rayleigh_quotient,
    rollnik_integral,
    scattering_condition_check,
)
from .rm import random_orthogonal_family, rm_check, rm_ratio

__all__ = [
    "DyadicBlocking",
    "blocking_constant_check",
    "blocking_constants",
    "intrablock_maximal_check",
    "intrablock_sum",
    "make_dyadic_blocking",
    "eigencount_condition_check",
    "phase_space_check",
    "phase_space_volume",
    "weyl_check",
    "weyl_count",
    "maximal_inequality_check",
    "maximal_ratio",
    "localized_multiplier_norm",
    "plancherel_check",
    "power_iteration",
    "bump_quotient",
    "coulomb_integral",
    "hardy_check",
    "near_extremal_family",
    "radial_rayleigh_quotient",
    "rollnik_integral",
    "scattering_condition_check",
    "random_orthogonal_family",
    "rm_check",
    "rm_ratio",
]

# wstrata/periods_abel/__init__.py

from wstrata.periods_abel.abel import AbelResult, PathHint, abel_divisor, abel_map, path_difference
from wstrata.periods_abel.homology import (
    Cycle,
    HomologyBasis,
    harvest_cycles,
    homology_basis,
    intersection_matrix,
    symplectic_reduction,
)
from wstrata.periods_abel.periods import PeriodData, cycle_periods, lattice_consistency, period_matrices
from wstrata.periods_abel.quadrature import FormIntegrand, adaptive_integrate, gauss_legendre
from wstrata.periods_abel.riemann_constant import (
    RiemannConstantData,
    base_divisor_image,
    canonical_class_residual,
    characteristic_of,
    half_period_distance,
    riemann_constant,
    shifted_abel_image,
    vanishing_score,
)

__all__ = [
    "AbelResult",
    "Cycle",
    "FormIntegrand",
    "HomologyBasis",
    "PathHint",
    "PeriodData",
    "RiemannConstantData",
    "abel_divisor",
    "abel_map",
    "adaptive_integrate",
    "base_divisor_image",
    "canonical_class_residual",
    "characteristic_of",
    "cycle_periods",
    "gauss_legendre",
    "half_period_distance",
    "harvest_cycles",
    "homology_basis",
    "intersection_matrix",
    "lattice_consistency",
    "path_difference",
    "period_matrices",
    "riemann_constant",
    "shifted_abel_image",
    "symplectic_reduction",
    "vanishing_score",
]

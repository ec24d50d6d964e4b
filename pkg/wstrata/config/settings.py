# wstrata/config/settings.py

from dataclasses import dataclass, fields, replace
from typing import Dict


@dataclass(frozen=True)
class Settings:
    """Numeric tolerances shared by the library; every field has a CLI or [run] override."""
    # theta
    theta_eps: float = 1e-12
    theta_radius_cap: float = 14.0
    # quadrature
    quad_order: int = 24
    quad_tol: float = 1e-12
    quad_max_intervals: int = 4000
    # geometry
    branch_tol: float = 1e-9
    clearance: float = 1e-6
    residual_tol: float = 1e-9
    # fs determinants
    degenerate_factor: float = 1e-10
    # checks
    residual_floor: float = 1e-12
    vanishing_tol: float = 1e-6
    denominator_tol: float = 1e-8
    theta_check_tol: float = 1e-8
    inversion_tol: float = 1e-5
    agreement_tol: float = 1e-9
    pentagonal_tol: float = 1e-4
    tau_symmetry_tol: float = 1e-7
    lattice_tol: float = 1e-9
    max_search_genus: int = 4
    vanishing_divisors: int = 20
    # basis search
    monomial_first: bool = True
    denominator_budget: int = 0

    def updated(self, **overrides) -> "Settings":
        known = {f.name for f in fields(self)}
        return replace(self, **{k: v for k, v in overrides.items() if k in known and v is not None})

    def as_dict(self) -> Dict[str, object]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_SETTINGS = Settings()

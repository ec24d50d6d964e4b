# wstrata/periods_abel/periods.py

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from wstrata.config import DEFAULT_SETTINGS, Settings
from wstrata.curve import CyclicCurveSpec, DifferentialData, differential_data, sheet_model
from wstrata.exceptions import PeriodError, TauNotSymmetric
from wstrata.periods_abel.homology import HomologyBasis, homology_basis
from wstrata.periods_abel.quadrature import FormIntegrand, adaptive_integrate
from wstrata.riemann_theta import RiemannMatrix

logger = logging.getLogger(__name__)


@dataclass
class PeriodData:
    """
    Half periods of the unnormalised forms: int_{alpha_i} nu_j = 2 omega1[j, i], int_{beta_i} nu_j = 2 omega2[j, i].
    """
    omega1: np.ndarray
    omega2: np.ndarray
    homology: Optional[HomologyBasis] = None
    curve_id: str = ""
    tau: RiemannMatrix = field(init=False)

    def __post_init__(self):
        self.omega1 = np.asarray(self.omega1, dtype=complex)
        self.omega2 = np.asarray(self.omega2, dtype=complex)
        if self.omega1.shape != self.omega2.shape or self.omega1.shape[0] != self.omega1.shape[1]:
            raise PeriodError(f"half-period shapes {self.omega1.shape} and {self.omega2.shape} do not match")
        self.tau = RiemannMatrix(np.linalg.solve(self.omega1, self.omega2))

    @property
    def genus(self) -> int:
        return self.omega1.shape[0]

    @property
    def lattice(self) -> np.ndarray:
        """Generators of Gamma as columns: [2 omega1 | 2 omega2]."""
        return np.hstack([2 * self.omega1, 2 * self.omega2])

    @property
    def condition(self) -> float:
        return float(np.linalg.cond(self.omega1))

    def normalize(self, value) -> np.ndarray:
        """w = (2 omega1)^{-1} w~."""
        return np.linalg.solve(2 * self.omega1, np.asarray(value, dtype=complex))

    def normalized_coordinates(self, u) -> np.ndarray:
        """Real (a, b) with u = a + tau b."""
        u = np.asarray(u, dtype=complex)
        b = self.tau.Y_inv @ u.imag
        a = u.real - self.tau.tau.real @ b
        return np.concatenate([a, b])

    def lattice_coordinates(self, value) -> np.ndarray:
        """Real coordinates of an unnormalised vector over the columns of `lattice`."""
        return self.normalized_coordinates(self.normalize(value))

    def lattice_distance(self, value, normalized: bool = False) -> float:
        coords = self.normalized_coordinates(value) if normalized else self.lattice_coordinates(value)
        return float(np.max(np.abs(coords - np.rint(coords))))


def cycle_periods(spec: CyclicCurveSpec, diff: DifferentialData, homology: HomologyBasis,
                  settings: Settings = DEFAULT_SETTINGS) -> np.ndarray:
    """(g, 2g) matrix of int_{gamma_c} nu_j over the harvested cycles."""
    model = sheet_model(spec)
    integrand = FormIntegrand(model, diff.forms())
    zeta = model.zeta
    edge_values = {}
    columns = []
    for cycle in homology.cycles:
        if cycle.edge not in edge_values:
            P, Q = cycle.start, cycle.end
            mid = 0.5 * (model.b[P] + model.b[Q])
            left = adaptive_integrate(integrand.ramified(P, mid - model.b[P], 0), settings=settings)
            right = adaptive_integrate(integrand.ramified(Q, mid - model.b[Q], 0), settings=settings)
            edge_values[cycle.edge] = left.value - right.value
            logger.debug("edge %d of %s: %d + %d intervals", cycle.edge, spec.curve_id, left.intervals, right.intervals)
        l = cycle.sheet
        factor = zeta ** ((l * integrand.b) % model.r) - zeta ** (((l + 1) * integrand.b) % model.r)
        columns.append(factor * edge_values[cycle.edge])
    return np.array(columns).T


def period_matrices(spec: CyclicCurveSpec, diff: Optional[DifferentialData] = None,
                    homology: Optional[HomologyBasis] = None,
                    settings: Settings = DEFAULT_SETTINGS) -> PeriodData:
    if not isinstance(spec, CyclicCurveSpec):
        raise PeriodError("periods are computed for cyclic covers only")
    diff = diff or differential_data(spec)
    homology = homology or homology_basis(spec)
    g = spec.genus

    # Step 1: periods over the harvested cycles
    raw = cycle_periods(spec, diff, homology, settings)

    # Step 2: move to the symplectic basis
    symplectic = raw @ homology.transform.T
    omega_a, omega_b = symplectic[:, :g], symplectic[:, g:]

    # Step 3: admission of tau
    data = PeriodData(omega1=omega_a / 2, omega2=omega_b / 2, homology=homology, curve_id=spec.curve_id)
    residual = data.tau.asymmetry
    if residual > settings.tau_symmetry_tol:
        raise TauNotSymmetric(residual)
    eigen = np.linalg.eigvalsh(data.tau.Y)
    logger.debug("periods for %s: tau asymmetry %.2e, min eig Im tau %.3e, cond omega1 %.2e",
                 spec.curve_id, residual, float(eigen[0]), data.condition)
    return data


def lattice_consistency(spec: CyclicCurveSpec, periods: PeriodData, diff: Optional[DifferentialData] = None,
                        settings: Settings = DEFAULT_SETTINGS) -> float:
    """Relative change of the alpha/beta periods when the quadrature order is doubled."""
    doubled = period_matrices(spec, diff, periods.homology,
                              settings.updated(quad_order=2 * settings.quad_order))
    scale = max(float(np.max(np.abs(periods.lattice))), settings.residual_floor)
    change = float(np.max(np.abs(doubled.lattice - periods.lattice))) / scale
    logger.debug("periods of %s move by %.2e at quadrature order %d", spec.curve_id, change, 2 * settings.quad_order)
    return change

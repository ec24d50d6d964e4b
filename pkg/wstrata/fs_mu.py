# wstrata/fs_mu.py

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from wstrata.config import DEFAULT_SETTINGS, Settings
from wstrata.curve import CurveSpec, DifferentialData, FunctionExpr, PointOnCurve, differential_data, ring_of
from wstrata.exceptions import DegenerateDivisor

logger = logging.getLogger(__name__)


@dataclass
class FSMatrix:
    """Rows are evaluation vectors (phi_hat_0(P_i), ..., phi_hat_{n-1}(P_i))."""
    entries: np.ndarray
    points: List[PointOnCurve]
    basis: List[FunctionExpr]

    @property
    def n(self) -> int:
        return len(self.points)

    def has_repeated_rows(self) -> bool:
        return any(np.array_equal(self.entries[i], self.entries[j])
                   for i in range(self.n) for j in range(i))

    def det(self) -> complex:
        if self.n == 0:
            return 1.0 + 0j
        if self.has_repeated_rows():
            return 0j
        return complex(np.linalg.det(self.entries))

    def row_scale(self) -> float:
        return float(np.prod(np.linalg.norm(self.entries, axis=1))) if self.n else 1.0


@dataclass
class MuExpansion:
    """
    mu_n(P) = phi_hat_n(P) + sum_{k<n} (-1)^{n-k} mu_{n,k} phi_hat_k(P), mu_{n,n} = 1.

    `psi` is the FS determinant of the defining points and `condition` the
    2-norm condition number of their FS matrix.
    """
    n: int
    coefficients: np.ndarray
    psi: complex
    condition: float
    basis: List[FunctionExpr]

    def signed(self) -> np.ndarray:
        """Coefficients of phi_hat_0..phi_hat_n in mu_n, i.e. (-1)^{n-k} mu_{n,k}."""
        return np.array([(-1) ** (self.n - k) * c for k, c in enumerate(self.coefficients)])

    def evaluate(self, spec: CurveSpec, P: PointOnCurve) -> complex:
        values = ring_of(spec).evaluate_many(self.basis, P)
        return complex(values @ self.signed())


def fs_matrix(spec: CurveSpec, points: Sequence[PointOnCurve],
              diff: Optional[DifferentialData] = None) -> FSMatrix:
    diff = diff or differential_data(spec)
    basis = diff.extended(len(points))
    ring = ring_of(spec)
    entries = np.array([ring.evaluate_many(basis, P) for P in points], dtype=complex)
    return FSMatrix(entries=entries.reshape(len(points), len(basis)), points=list(points), basis=basis)


def fs_det(spec: CurveSpec, points: Sequence[PointOnCurve],
           diff: Optional[DifferentialData] = None) -> complex:
    return fs_matrix(spec, points, diff).det()


def _gate(matrix: FSMatrix, settings: Settings) -> complex:
    psi = matrix.det()
    threshold = settings.degenerate_factor * matrix.row_scale()
    if abs(psi) <= threshold:
        raise DegenerateDivisor(psi, threshold)
    return psi


def mu(spec: CurveSpec, n: int, P: PointOnCurve, points: Sequence[PointOnCurve],
       diff: Optional[DifferentialData] = None, settings: Settings = DEFAULT_SETTINGS) -> complex:
    if len(points) != n:
        raise ValueError(f"mu_{n} needs {n} points, got {len(points)}")
    diff = diff or differential_data(spec)
    psi = _gate(fs_matrix(spec, points, diff), settings)
    return fs_det(spec, list(points) + [P], diff) / psi


def mu_coefficients(spec: CurveSpec, n: int, points: Sequence[PointOnCurve],
                    diff: Optional[DifferentialData] = None,
                    settings: Settings = DEFAULT_SETTINGS) -> MuExpansion:
    """
    Expansion coefficients of mu_n from the cofactors of the last row of psi_{n+1}.

    The cofactor ratios c_k solve Psi_n c = -phi_hat_n(P_i); mu_{n,k} = (-1)^{n-k} c_k.
    """
    if len(points) != n:
        raise ValueError(f"mu_{n} needs {n} points, got {len(points)}")
    diff = diff or differential_data(spec)
    matrix = fs_matrix(spec, points, diff)
    psi = _gate(matrix, settings)

    basis = diff.extended(n + 1)
    ring = ring_of(spec)
    last = np.array([ring.evaluate(basis[n], P) for P in points], dtype=complex)
    c = np.linalg.solve(matrix.entries, -last) if n else np.zeros(0, dtype=complex)
    coefficients = np.array([(-1) ** (n - k) * ck for k, ck in enumerate(c)] + [1.0], dtype=complex)
    condition = float(np.linalg.cond(matrix.entries)) if n else 1.0
    logger.debug("mu_%d coefficients: |psi| = %.3e, cond = %.3e", n, abs(psi), condition)
    return MuExpansion(n=n, coefficients=coefficients, psi=psi, condition=condition, basis=basis)

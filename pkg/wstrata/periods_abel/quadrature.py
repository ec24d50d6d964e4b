# wstrata/periods_abel/quadrature.py

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Sequence, Tuple

import numpy as np

from wstrata.config import DEFAULT_SETTINGS, Settings
from wstrata.curve import Term
from wstrata.curve.sheets import SheetModel, log_down
from wstrata.exceptions import QuadratureBudgetExceeded

logger = logging.getLogger(__name__)


@lru_cache(maxsize=16)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1]."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return 0.5 * (nodes + 1.0), 0.5 * weights


@dataclass
class QuadratureResult:
    value: np.ndarray
    error: float
    intervals: int


def adaptive_integrate(f: Callable[[np.ndarray], np.ndarray], a: float = 0.0, b: float = 1.0,
                       settings: Settings = DEFAULT_SETTINGS) -> QuadratureResult:
    """
    Adaptive Gauss-Legendre for vector-valued f: f(t) has shape (len(t), k).

    An interval is accepted when its rule and the sum over its two halves
    agree to its share of the tolerance; otherwise the halves are pushed.
    Intervals are processed from a stack in a fixed order so the result is
    reproducible bit for bit.
    """
    nodes, weights = gauss_legendre(settings.quad_order)

    def rule(lo, hi):
        t = lo + (hi - lo) * nodes
        return (hi - lo) * (weights @ f(t))

    width = b - a
    stack: List[Tuple[float, float, np.ndarray]] = [(a, b, rule(a, b))]
    total = np.zeros_like(stack[0][2])
    error = 0.0
    intervals = 1
    while stack:
        lo, hi, whole = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = rule(lo, mid), rule(mid, hi)
        intervals += 2
        diff = float(np.max(np.abs(whole - (left + right))))
        share = settings.quad_tol * (hi - lo) / width
        scale = float(np.max(np.abs(left + right)))
        if diff <= max(share, 1e-15 * scale) or hi - lo < 1e-14 * width:
            total = total + left + right
            error += diff
            continue
        if intervals > settings.quad_max_intervals:
            raise QuadratureBudgetExceeded(intervals, diff)
        stack.append((mid, hi, right))
        stack.append((lo, mid, left))
    return QuadratureResult(value=total, error=error, intervals=intervals)


class FormIntegrand:
    """
    Integrands of the forms nu_j = x^a y^b prod (x-b_i)^{c_i} dx on the sheets of a cyclic cover.

    On sheet l the form is zeta^{l b} x^a exp(sum_i p_i (log_down(X - X_i) + i theta)) dx
    with p_i = c_i + b m_i / r, which keeps every power single valued on the
    cut plane.
    """

    def __init__(self, model: SheetModel, forms: Sequence[Term]):
        self.model = model
        self.r = model.r
        self.a = np.array([t.a for t in forms], dtype=float)
        self.b = np.array([t.b for t in forms], dtype=int)
        self.coef = np.array([t.coef for t in forms], dtype=complex)
        branch = np.array([t.branch for t in forms], dtype=float)
        self.p = branch + np.outer(self.b, model.m) / self.r
        # r p_{j,i} is an integer: the u-power at a ramified endpoint
        self.rp = np.rint(self.r * self.p).astype(int)

    def sheet_factor(self, sheet: int) -> np.ndarray:
        return self.model.zeta ** ((sheet * self.b) % self.r) * self.coef

    def _log_terms(self, x: np.ndarray, skip: int = -1) -> np.ndarray:
        X = self.model.to_plane(x)
        logs = log_down(np.subtract.outer(X, self.model.X)) + 1j * self.model.theta
        if skip >= 0:
            logs[:, skip] = 0
        return logs

    def _power_x(self, x: np.ndarray) -> np.ndarray:
        if not np.any(self.a):
            return np.ones((len(x), len(self.a)), dtype=complex)
        return np.power.outer(x, self.a.astype(int)).astype(complex)

    def segment(self, xa: complex, xb: complex, sheet: int) -> Callable[[np.ndarray], np.ndarray]:
        """Integrand in t for the straight segment xa -> xb staying on one sheet."""
        factor = self.sheet_factor(sheet) * (xb - xa)

        def f(t):
            x = xa + t * (xb - xa)
            return self._power_x(x) * np.exp(self._log_terms(x) @ self.p.T) * factor
        return f

    def ramified(self, index: int, D: complex, sheet: int) -> Callable[[np.ndarray], np.ndarray]:
        """Integrand in u for x = b_index + D u^r, u in [0, 1], starting at the branch point."""
        model = self.model
        b = model.b[index]
        log_D = log_down(complex(model.to_plane(b + D)) - model.X[index]) + 1j * model.theta
        factor = self.sheet_factor(sheet) * self.r * D * np.exp(self.p[:, index] * log_D)
        power = self.rp[:, index] + self.r - 1

        def f(u):
            x = b + D * u ** self.r
            rest = np.exp(self._log_terms(x, skip=index) @ self.p.T)
            return self._power_x(x) * rest * np.power.outer(u, power) * factor
        return f

    def ray(self, anchor: complex, L: float, sheet: int) -> Callable[[np.ndarray], np.ndarray]:
        """
        Integrand in s for X(s) = A + i L (s^{-r} - 1), s in (0, 1], from infinity to the anchor.

        Evaluated in log form: the growth s^{-r} of X is split off every
        logarithm so nothing overflows as s -> 0.
        """
        model, r = self.model, self.r
        A = complex(model.to_plane(anchor))
        rot = np.exp(1j * model.theta)
        order_total = -r * (self.a + self.p.sum(axis=1)) - r - 1
        factor = self.sheet_factor(sheet) * (-1j * r * L * rot)

        def f(s):
            sr = s ** r
            log_s = np.log(s)
            base = 1j * L + sr[:, None] * (A - 1j * L - model.X[None, :])
            logs = log_down(base) + 1j * model.theta
            xs = rot * (1j * L + sr * (A - 1j * L)) + model.center * sr
            log_x = np.log(xs)
            exponent = logs @ self.p.T + np.outer(log_x, self.a) + np.outer(log_s, order_total)
            return np.exp(exponent) * factor
        return f

    def ray_point(self, anchor: complex, L: float, s: float) -> complex:
        X = complex(self.model.to_plane(anchor)) + 1j * L * (s ** (-self.r) - 1)
        return complex(self.model.from_plane(X))


def integrate(f: Callable[[np.ndarray], np.ndarray], settings: Settings = DEFAULT_SETTINGS) -> np.ndarray:
    return adaptive_integrate(f, 0.0, 1.0, settings).value

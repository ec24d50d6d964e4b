# wstrata/curve/sheets.py

import logging
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from wstrata.config import DEFAULT_SETTINGS, Settings
from wstrata.curve.specs import CyclicCurveSpec, PlaneWeierstrassSpec, PointOnCurve
from wstrata.exceptions import BranchClearanceViolated, NearBranchPoint, PathCrossesBranchCut

logger = logging.getLogger(__name__)

ROTATION_CANDIDATES = 61


def log_down(z):
    """Logarithm with argument in (-pi/2, 3pi/2]: the cut runs straight down from 0."""
    return np.log(np.asarray(z, dtype=complex) / 1j) + 0.5j * np.pi


def arg_down(z):
    return np.imag(log_down(z))


class SheetModel:
    """
    Sheet bookkeeping for y^r = prod (x - b_i)^{m_i}.

    The x-plane is shifted to the centroid of the branch points and rotated by
    `theta` so that branch points have distinct real projections X_k. Every
    branch point carries a cut running straight down from it. On the cut
    plane y_0(x) = exp(i theta s/r) prod exp((m_k/r) log_down(X - X_k)) is
    single valued and sheet l means y = zeta^l y_0(x), zeta = exp(2 pi i/r).
    Crossing the cut of b_k from left to right moves sheet l to l + m_k.
    """

    def __init__(self, spec: CyclicCurveSpec, theta: Optional[float] = None):
        self.spec = spec
        self.r = spec.r
        self.b = spec.points
        self.m = np.array(spec.mults, dtype=float)
        self.center = complex(np.mean(self.b))
        self.theta = self._pick_rotation() if theta is None else float(theta)
        self.rot = np.exp(-1j * self.theta)
        self.X = (self.b - self.center) * self.rot
        self.order = [int(k) for k in np.argsort(self.X.real, kind="stable")]
        self.zeta = np.exp(2j * np.pi / self.r)
        self.spread = float(np.max(np.abs(self.X))) + 1.0
        logger.debug("sheet model for %s: theta=%.6f, order=%s", spec.curve_id, self.theta, self.order)

    def _pick_rotation(self) -> float:
        b = self.b - np.mean(self.b)
        if len(b) == 1:
            return 0.0
        best, best_gap = 0.0, -1.0
        for j in range(ROTATION_CANDIDATES):
            theta = j * np.pi / ROTATION_CANDIDATES
            proj = np.sort((b * np.exp(-1j * theta)).real)
            gap = float(np.min(np.diff(proj)))
            if gap > best_gap * (1 + 1e-9):
                best, best_gap = theta, gap
        return best

    # coordinates

    def to_plane(self, x):
        return (np.asarray(x, dtype=complex) - self.center) * self.rot

    def from_plane(self, X):
        return np.asarray(X, dtype=complex) / self.rot + self.center

    def log_y0(self, x):
        X = self.to_plane(x)
        logs = log_down(np.subtract.outer(X, self.X))
        return 1j * self.theta * self.spec.s / self.r + logs @ (self.m / self.r)

    def y(self, x, sheet: int):
        return self.zeta ** (sheet % self.r) * np.exp(self.log_y0(x))

    def sheet_of(self, x: complex, y: complex) -> int:
        y0 = complex(self.y(x, 0))
        return int(np.argmin([abs(self.zeta ** l * y0 - y) for l in range(self.r)]))

    # cut crossings

    def crossings(self, xa: complex, xb: complex) -> List[Tuple[float, int, int]]:
        """(t, branch index, sheet shift) for each cut met on the segment xa -> xb, sorted by t."""
        Xa, Xb = complex(self.to_plane(xa)), complex(self.to_plane(xb))
        dx = Xb.real - Xa.real
        hits = []
        for k, Xk in enumerate(self.X):
            if Xa.real < Xk.real <= Xb.real or Xb.real < Xk.real <= Xa.real:
                t = (Xk.real - Xa.real) / dx
                height = Xa.imag + t * (Xb.imag - Xa.imag)
                if abs(height - Xk.imag) <= 1e-12 * self.spread:
                    raise PathCrossesBranchCut(f"segment passes through branch point {k}")
                if height < Xk.imag:
                    shift = int(self.spec.mults[k]) if dx > 0 else -int(self.spec.mults[k])
                    hits.append((t, k, shift))
        hits.sort()
        return hits

    def transport(self, path: Sequence[complex], sheet: int) -> int:
        for xa, xb in zip(path[:-1], path[1:]):
            for _, _, shift in self.crossings(xa, xb):
                sheet += shift
        return sheet % self.r

    def clearance(self, path: Sequence[complex], skip: Sequence[int] = ()) -> float:
        best = np.inf
        for xa, xb in zip(path[:-1], path[1:]):
            d = xb - xa
            for k, b in enumerate(self.b):
                if k in skip:
                    continue
                t = 0.0 if d == 0 else min(1.0, max(0.0, ((b - xa) * np.conj(d)).real / abs(d) ** 2))
                best = min(best, abs(xa + t * d - b))
        return float(best)

    def monodromy(self, loop: Sequence[complex], settings: Settings = DEFAULT_SETTINGS) -> List[int]:
        """Sheet permutation of a closed polygon: entry l is the sheet reached from sheet l."""
        if abs(loop[0] - loop[-1]) > 1e-12 * self.spread:
            loop = list(loop) + [loop[0]]
        distance = self.clearance(loop)
        if distance < settings.clearance * self.spread:
            raise BranchClearanceViolated(distance, settings.clearance * self.spread)
        return [self.transport(loop, l) for l in range(self.r)]

    def continue_numerically(self, path: Sequence[complex], sheet: int, steps: int = 512) -> int:
        """Root-tracking oracle: follow y along the polygon picking the nearest of the r roots."""
        y = complex(self.y(path[0], sheet))
        for xa, xb in zip(path[:-1], path[1:]):
            for t in np.linspace(0.0, 1.0, steps + 1)[1:]:
                x = xa + t * (xb - xa)
                roots = self.zeta ** np.arange(self.r) * np.exp(self.log_y0(x))
                y = complex(roots[np.argmin(np.abs(roots - y))])
        return self.sheet_of(path[-1], y)


@lru_cache(maxsize=64)
def sheet_model(spec: CyclicCurveSpec) -> SheetModel:
    return SheetModel(spec)


def point_on_curve(spec, x0: complex, sheet: int = 0, settings: Settings = DEFAULT_SETTINGS) -> PointOnCurve:
    x0 = complex(x0)
    if isinstance(spec, PlaneWeierstrassSpec):
        roots = np.roots(spec.y_polynomial(x0))
        roots = sorted(roots, key=lambda z: (round(float(np.angle(z)), 12), abs(z)))
        return PointOnCurve(x=x0, y=complex(roots[sheet % spec.m]), sheet=sheet % spec.m)

    model = sheet_model(spec)
    distances = np.abs(spec.points - x0)
    k = int(np.argmin(distances))
    if distances[k] < settings.branch_tol * model.spread:
        raise NearBranchPoint(x0, k, float(distances[k]))
    return PointOnCurve(x=x0, y=complex(model.y(x0, sheet)), sheet=sheet % spec.r)


def branch_point(spec: CyclicCurveSpec, index: int) -> PointOnCurve:
    return PointOnCurve(x=complex(spec.points[index]), y=0j, sheet=0, branch_index=index)


def point_near_infinity(spec: CyclicCurveSpec, t: complex, sheet: int = 0) -> PointOnCurve:
    x = complex(t) ** (-spec.r)
    P = point_on_curve(spec, x, sheet)
    return PointOnCurve(x=P.x, y=P.y, sheet=P.sheet, t=complex(t))


def random_points(spec, rng: np.random.Generator, count: int,
                  settings: Settings = DEFAULT_SETTINGS) -> List[PointOnCurve]:
    """Generic points in a box around the branch locus, kept away from branch points."""
    if isinstance(spec, PlaneWeierstrassSpec):
        centre, radius, avoid, sheets = 0j, 1.5, np.array([]), spec.m
    else:
        centre = complex(np.mean(spec.points))
        radius = float(np.max(np.abs(spec.points - centre))) + 0.5
        avoid, sheets = spec.points, spec.r
    points = []
    while len(points) < count:
        x0 = centre + radius * complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        sheet = int(rng.integers(sheets))
        if avoid.size and np.min(np.abs(avoid - x0)) < 0.15 * radius:
            continue
        points.append(point_on_curve(spec, x0, sheet, settings))
    return points

# wstrata/periods_abel/abel.py

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from wstrata.config import DEFAULT_SETTINGS, Settings
from wstrata.curve import CyclicCurveSpec, DifferentialData, PointOnCurve, differential_data, sheet_model
from wstrata.curve.sheets import SheetModel
from wstrata.exceptions import BranchClearanceViolated
from wstrata.periods_abel.periods import PeriodData
from wstrata.periods_abel.quadrature import FormIntegrand, adaptive_integrate

logger = logging.getLogger(__name__)

DEFAULT_OFFSETS = (0.0, 0.37, -0.37, 0.71, -0.71, 1.13, -1.13)


@dataclass(frozen=True)
class PathHint:
    """
    Shape of the path from infinity to a point.

    The path comes down the vertical ray (in the rotated plane) to the
    anchor x_P + offset and then follows the polyline through `waypoints`
    to P.
    """
    offset: complex = 0j
    waypoints: Tuple[complex, ...] = ()


@dataclass
class AbelResult:
    value: np.ndarray
    normalized: np.ndarray
    path: List[complex] = field(default_factory=list)
    start_sheet: int = 0
    clearance: float = np.inf

    def __add__(self, other: "AbelResult") -> "AbelResult":
        return AbelResult(
            value=self.value + other.value,
            normalized=self.normalized + other.normalized,
            path=self.path + other.path,
            clearance=min(self.clearance, other.clearance),
        )


def _ray_clearance(model: SheetModel, anchor: complex, skip: Sequence[int]) -> float:
    XA = complex(model.to_plane(anchor))
    best = np.inf
    for k, Xk in enumerate(model.X):
        if k in skip:
            continue
        if Xk.imag >= XA.imag:
            d = abs(Xk.real - XA.real)
        else:
            d = abs(Xk - XA)
        best = min(best, d)
    return float(best)


def _polyline(model: SheetModel, P: PointOnCurve, hint: PathHint) -> List[complex]:
    x = complex(P.x)
    if P.is_ramified and hint.offset == 0 and not hint.waypoints:
        others = [abs(b - x) for k, b in enumerate(model.b) if k != P.branch_index]
        lift = 0.5 * min(others) if others else 1.0
        anchor = x + 1j * lift * np.exp(1j * model.theta)
    else:
        anchor = x + complex(hint.offset)
    return [anchor] + [complex(w) for w in hint.waypoints] + [x]


def _clearance(model: SheetModel, path: List[complex], P: PointOnCurve) -> float:
    skip = (P.branch_index,) if P.is_ramified else ()
    return min(_ray_clearance(model, path[0], skip), model.clearance(path, skip=skip) if len(path) > 1 else np.inf)


def _choose_path(model: SheetModel, P: PointOnCurve, hint: Optional[PathHint],
                 settings: Settings) -> Tuple[List[complex], float]:
    limit = settings.clearance * model.spread
    if hint is not None:
        path = _polyline(model, P, hint)
        distance = _clearance(model, path, P)
        if distance < limit:
            raise BranchClearanceViolated(distance, limit)
        return path, distance

    best = None
    for offset in DEFAULT_OFFSETS:
        candidate = PathHint(offset=offset * model.spread * np.exp(1j * model.theta) if offset else 0j)
        path = _polyline(model, P, candidate)
        distance = _clearance(model, path, P)
        if best is None or distance > best[1] * (1 + 1e-9):
            best = (path, distance)
        # a clear vertical descent is the preferred path
        if distance >= 0.05 * model.spread:
            break
    if best[1] < limit:
        raise BranchClearanceViolated(best[1], limit)
    return best


def abel_map(spec: CyclicCurveSpec, periods: PeriodData, P: PointOnCurve,
             hint: Optional[PathHint] = None, diff: Optional[DifferentialData] = None,
             settings: Settings = DEFAULT_SETTINGS) -> AbelResult:
    """
    Unnormalised Abel image w~(P) = int_infinity^P nu along a tracked path.

    The base point is infinity itself: the ray is parametrised by the local
    parameter so the integrand is regular at s = 0. A ramified endpoint is
    reached with the substitution x = b + D u^r.
    """
    g = spec.genus
    if P.at_infinity:
        zero = np.zeros(g, dtype=complex)
        return AbelResult(value=zero, normalized=zero.copy())

    model = sheet_model(spec)
    diff = diff or differential_data(spec)
    integrand = FormIntegrand(model, diff.forms())
    path, distance = _choose_path(model, P, hint, settings)

    # Step 1: split the polyline into single-sheet pieces
    pieces = []
    if P.is_ramified:
        mid = 0.5 * (path[-2] + path[-1])
        segments = list(zip(path[:-2], path[1:-1])) + [(path[-2], mid)]
    else:
        segments = list(zip(path[:-1], path[1:]))
    shift = 0
    for xa, xb in segments:
        t0 = 0.0
        for t, _, step in model.crossings(xa, xb):
            pieces.append((xa + t0 * (xb - xa), xa + t * (xb - xa), shift))
            shift += step
            t0 = t
        pieces.append((xa + t0 * (xb - xa), xb, shift))
    start = 0 if P.is_ramified else (P.sheet - shift) % model.r

    # Step 2: integrate the ray, the pieces and the ramified tail
    value = adaptive_integrate(integrand.ray(path[0], model.spread, start), settings=settings).value
    for xa, xb, offset in pieces:
        if xa == xb:
            continue
        value = value + adaptive_integrate(integrand.segment(xa, xb, (start + offset) % model.r),
                                           settings=settings).value
    if P.is_ramified:
        i = P.branch_index
        tail = adaptive_integrate(integrand.ramified(i, mid - model.b[i], (start + shift) % model.r),
                                  settings=settings).value
        value = value - tail

    logger.debug("abel map of x=%s on %s: %d pieces, clearance %.3e", P.x, spec.curve_id, len(pieces) + 1, distance)
    return AbelResult(value=value, normalized=periods.normalize(value), path=path,
                      start_sheet=start, clearance=distance)


def abel_divisor(spec: CyclicCurveSpec, periods: PeriodData, points: Sequence[PointOnCurve],
                 multiplicities: Optional[Sequence[int]] = None,
                 hints: Optional[Sequence[Optional[PathHint]]] = None,
                 diff: Optional[DifferentialData] = None,
                 settings: Settings = DEFAULT_SETTINGS) -> AbelResult:
    """w~(sum n_i P_i) = sum n_i w~(P_i)."""
    g = spec.genus
    total = AbelResult(value=np.zeros(g, dtype=complex), normalized=np.zeros(g, dtype=complex))
    multiplicities = multiplicities or [1] * len(points)
    hints = hints or [None] * len(points)
    for P, n, hint in zip(points, multiplicities, hints):
        image = abel_map(spec, periods, P, hint, diff, settings)
        total = total + AbelResult(value=n * image.value, normalized=n * image.normalized,
                                   path=image.path, clearance=image.clearance)
    return total


def path_difference(periods: PeriodData, first: AbelResult, second: AbelResult) -> np.ndarray:
    """Lattice coordinates of first - second; integral when both paths end at the same point."""
    return periods.lattice_coordinates(first.value - second.value)

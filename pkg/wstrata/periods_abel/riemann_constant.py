# wstrata/periods_abel/riemann_constant.py

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from wstrata.config import DEFAULT_SETTINGS, Settings
from wstrata.curve import CyclicCurveSpec, DifferentialData, branch_point, differential_data, random_points
from wstrata.exceptions import CharacteristicSearchSkipped, RiemannConstantError, VanishingTestFailed
from wstrata.periods_abel.abel import abel_divisor, abel_map
from wstrata.periods_abel.periods import PeriodData
from wstrata.riemann_theta import Characteristic, characteristics, half_period_bits, half_period_moduli, theta_modulus

logger = logging.getLogger(__name__)

SCREEN_DIVISORS = 3
SCREEN_EPS = 1e-8


@dataclass
class RiemannConstantData:
    """
    Riemann constant xi for the base point infinity, in normalised coordinates.

    `xi_s` is the shifted constant xi - w(B_0) when the halved base divisor
    is known, `delta` the characteristic with xi_s = delta'' + tau delta'.
    `shift_bits` are the (a, b) with xi = w(B)/2 + (a + tau b)/2; `resolved`
    is False when the characteristic search was skipped.
    """
    xi: np.ndarray
    base_image: np.ndarray
    score: float
    resolved: bool = True
    xi_s: Optional[np.ndarray] = None
    delta: Optional[Characteristic] = None
    shift_bits: Tuple[Tuple[int, ...], Tuple[int, ...]] = ((), ())
    notes: List[str] = field(default_factory=list)


def divisor_images(spec: CyclicCurveSpec, periods: PeriodData, count: int, degree: int,
                   rng: np.random.Generator, diff: Optional[DifferentialData] = None,
                   settings: Settings = DEFAULT_SETTINGS) -> List[np.ndarray]:
    """Normalised Abel images of `count` random effective divisors of the given degree."""
    images = []
    for _ in range(count):
        points = random_points(spec, rng, degree, settings)
        images.append(abel_divisor(spec, periods, points, diff=diff, settings=settings).normalized)
    return images


def base_divisor_image(spec: CyclicCurveSpec, periods: PeriodData, places: Sequence[Tuple[int, int]],
                       diff: Optional[DifferentialData] = None, settings: Settings = DEFAULT_SETTINGS) -> np.ndarray:
    """w(sum n_i B_i) for (branch index, multiplicity) pairs."""
    total = np.zeros(spec.genus, dtype=complex)
    for index, n in places:
        total = total + n * abel_map(spec, periods, branch_point(spec, index), diff=diff, settings=settings).normalized
    return total


def vanishing_score(periods: PeriodData, xi: np.ndarray, images: Sequence[np.ndarray],
                    eps: Optional[float] = None, settings: Settings = DEFAULT_SETTINGS) -> float:
    return max(theta_modulus(w + xi, periods.tau, eps=eps, settings=settings) for w in images)


def half_period(periods: PeriodData, a: Sequence[int], b: Sequence[int]) -> np.ndarray:
    return 0.5 * (np.asarray(a, dtype=float) + periods.tau.tau @ np.asarray(b, dtype=float))


def characteristic_of(periods: PeriodData, value: np.ndarray, tol: float = 1e-6) -> Optional[Characteristic]:
    """delta with value = delta'' + tau delta' modulo the lattice, or None if value is not a half period."""
    coords = 2 * periods.normalized_coordinates(value)
    if np.max(np.abs(coords - np.rint(coords))) > tol:
        return None
    bits = np.rint(coords).astype(int) % 2
    g = periods.genus
    return Characteristic.from_bits(bits[g:], bits[:g])


def canonical_class_residual(periods: PeriodData, xi: np.ndarray, base_image: np.ndarray) -> float:
    """Distance of 2 xi + w(K) from the lattice, with w(K) = -w(B) for K ~ (2g-2+d1) infinity - B."""
    return periods.lattice_distance(2 * xi - base_image, normalized=True)


def half_period_distance(periods: PeriodData, base_image: np.ndarray) -> float:
    """Normalised distance of w(B) from the lattice; near zero means xi is a half period."""
    return periods.lattice_distance(base_image, normalized=True)


def riemann_constant(spec: CyclicCurveSpec, periods: PeriodData, diff: Optional[DifferentialData] = None,
                     settings: Settings = DEFAULT_SETTINGS, seed: int = 0,
                     allow_unresolved: bool = False) -> RiemannConstantData:
    """
    Riemann constant from 2 xi = w(B) and the vanishing of theta on W_{g-1} + xi.

    The candidates are w(B)/2 plus the 4^g half periods. They are screened
    together on the zero divisor ((g-1) infinity) and a few random divisors
    of degree g - 1; the survivor is confirmed on the configured number of
    divisors. The characteristic of the shifted constant is searched for
    g <= max_search_genus only.
    """
    diff = diff or differential_data(spec)
    g = spec.genus
    base = base_divisor_image(spec, periods, [(p.index, n) for p, n in diff.B], diff, settings)
    xi0 = 0.5 * base

    rng = np.random.default_rng(seed)
    images = divisor_images(spec, periods, settings.vanishing_divisors, g - 1, rng, diff, settings)

    # Step 1: screen every half-period shift at once
    screen = np.zeros((2 ** g, 2 ** g))
    for w in [np.zeros(g, dtype=complex)] + images[:SCREEN_DIVISORS]:
        screen = np.maximum(screen, half_period_moduli(w + xi0, periods.tau, SCREEN_EPS, settings))
    order = np.argsort(screen, axis=None)
    row, col = np.unravel_index(order[0], screen.shape)
    a, b = half_period_bits(g, int(col)), half_period_bits(g, int(row))
    runner_up = float(screen.flat[order[1]]) if screen.size > 1 else np.inf

    # Step 2: confirm on every divisor
    xi = xi0 + half_period(periods, a, b)
    score = vanishing_score(periods, xi, images, settings=settings)
    if score > settings.vanishing_tol:
        raise VanishingTestFailed(score, settings.vanishing_tol)
    logger.debug("riemann constant for %s: shift a=%s b=%s, score %.2e, runner-up %.2e",
                 spec.curve_id, a, b, score, runner_up)

    data = RiemannConstantData(xi=xi, base_image=base, score=score, shift_bits=(a, b))
    return _shifted(spec, periods, data, diff, settings, allow_unresolved)


def search_characteristic(periods: PeriodData, value: np.ndarray, tol: float = 1e-6) -> Optional[Characteristic]:
    """The characteristic delta with delta'' + tau delta' = value modulo the lattice, by enumeration."""
    value = np.asarray(value, dtype=complex)
    for delta in characteristics(periods.genus):
        point = np.array(delta.delta2) + periods.tau.tau @ np.array(delta.delta1)
        if periods.lattice_distance(value - point, normalized=True) < tol:
            return delta
    return None


def _shifted(spec: CyclicCurveSpec, periods: PeriodData, data: RiemannConstantData,
             diff: DifferentialData, settings: Settings, allow_unresolved: bool) -> RiemannConstantData:
    g = spec.genus
    if diff.d1 == 0:
        data.xi_s = data.xi
    elif spec.b0:
        image = base_divisor_image(spec, periods, spec.b0, diff, settings)
        residual = periods.lattice_distance(2 * image - data.base_image, normalized=True)
        if residual > settings.vanishing_tol:
            data.notes.append(f"2 w(B_0) differs from w(B) by {residual:.2e} off the lattice; B_0 rejected")
            return data
        data.xi_s = data.xi - image

    if g > settings.max_search_genus and diff.d1 > 0:
        if not allow_unresolved:
            raise CharacteristicSearchSkipped(g, settings.max_search_genus)
        logger.warning("characteristic search for %s skipped: genus %d above %d",
                       spec.curve_id, g, settings.max_search_genus)
        data.resolved = False
        data.notes.append("characteristic search skipped; only the xi form is available")
        return data
    if data.xi_s is None:
        data.notes.append("halved base divisor unknown; only the xi form is available")
        return data
    data.delta = search_characteristic(periods, data.xi_s) if g <= settings.max_search_genus \
        else characteristic_of(periods, data.xi_s)
    if data.delta is None:
        data.notes.append("shifted constant is not a half period")
    return data


def shifted_abel_image(periods: PeriodData, data: RiemannConstantData, image: np.ndarray) -> np.ndarray:
    """w_s(D) = w(D) + w(B_0), read off as xi - xi_s so no extra path is integrated."""
    if data.xi_s is None:
        raise RiemannConstantError("shifted Abel map needs the halved base divisor")
    return np.asarray(image, dtype=complex) + (data.xi - data.xi_s)

# wstrata/inversion.py

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from wstrata.config import DEFAULT_SETTINGS, Settings
from wstrata.curve import (
    CurveSpec,
    DifferentialData,
    PointOnCurve,
    curve_semigroup,
    differential_data,
    random_points,
    ring_of,
    sheet_model,
)
from wstrata.exceptions import (
    DegenerateConfiguration,
    DegenerateDivisor,
    HessianUnavailable,
    PreconditionFailed,
    SpecialDivisor,
    ThetaDenominatorVanishes,
    TruncationBudgetExceeded,
)
from wstrata.fs_mu import fs_matrix, mu, mu_coefficients
from wstrata.periods_abel import PathHint, PeriodData, RiemannConstantData, abel_divisor
from wstrata.periods_abel.quadrature import FormIntegrand, adaptive_integrate
from wstrata.riemann_theta import ThetaRequest, evaluate, theta_modulus

logger = logging.getLogger(__name__)

SAMPLE_POINTS = 5


@dataclass
class InversionReport:
    """
    One identity check: lhs from determinants, rhs from theta derivatives.

    `raw` is the plain gradient ratio before the sign (-1)^{k+1-i};
    `gates` holds the values that admitted the row and `checks` any
    secondary residuals of the same row.
    """
    check: str
    curve_id: str
    k: int
    i: int
    lhs: complex
    rhs: complex
    residual: float
    raw: Optional[complex] = None
    gates: Dict[str, object] = field(default_factory=dict)
    conditioning: Dict[str, float] = field(default_factory=dict)
    checks: Dict[str, float] = field(default_factory=dict)

    @property
    def worst(self) -> float:
        return max([self.residual] + list(self.checks.values()))

    def as_record(self) -> Dict[str, object]:
        pair = lambda z: None if z is None else [float(np.real(z)), float(np.imag(z))]
        return {
            "check": self.check,
            "curve": self.curve_id,
            "k": self.k,
            "i": self.i,
            "lhs": pair(self.lhs),
            "rhs": pair(self.rhs),
            "raw": pair(self.raw),
            "residual": self.residual,
            "checks": dict(self.checks),
            "gates": dict(self.gates),
            "conditioning": dict(self.conditioning),
        }


@dataclass
class StratumPoint:
    """Abel image of a divisor shifted into the theta divisor, with u-derivatives of F(u) = theta(A u + xi)."""
    points: List[PointOnCurve]
    z: np.ndarray
    value: complex
    grad: np.ndarray
    hessian: Optional[np.ndarray]
    scale: float
    stratum_regular: bool

    def modulus(self, value) -> float:
        """Lattice-invariant size of a theta quantity at z."""
        return float(np.max(np.abs(value)) * self.scale)


def relative_residual(lhs: complex, rhs: complex, scale: float = 0.0,
                      settings: Settings = DEFAULT_SETTINGS) -> float:
    """|lhs - rhs| / max(|lhs|, |rhs|, floor), floor = max(residual_floor, scale)."""
    floor = max(settings.residual_floor, scale)
    return float(abs(lhs - rhs) / max(abs(lhs), abs(rhs), floor))


def stratum_regular(spec: CurveSpec, k: int) -> bool:
    """W_k + (g-1-k) infinity misses the singular locus of Theta iff no positive element of H is <= g-1-k."""
    gap = spec.genus - 1 - k
    return gap < curve_semigroup(spec).a_min


def stratum_point(spec: CurveSpec, periods: PeriodData, constant: RiemannConstantData,
                  points: Sequence[PointOnCurve], order: int = 1, delta_form: bool = False,
                  hints: Optional[Sequence[Optional[PathHint]]] = None,
                  diff: Optional[DifferentialData] = None,
                  settings: Settings = DEFAULT_SETTINGS) -> StratumPoint:
    """
    Theta data at w(D) + xi, or at w_s(D) with theta[delta] when `delta_form`.

    Partial derivatives are taken in the unnormalised coordinates u with
    z = (2 omega1)^{-1} u: grad_u = A^T grad_z and H_u = A^T H_z A.
    """
    image = abel_divisor(spec, periods, points, hints=hints, diff=diff, settings=settings).normalized
    if delta_form:
        if constant.delta is None or constant.xi_s is None:
            raise PreconditionFailed("delta form needs a verified characteristic for the shifted constant")
        z = image + constant.xi - constant.xi_s
        delta = constant.delta
    else:
        z = image + constant.xi
        delta = None

    request = ThetaRequest(z, order, settings.theta_eps, delta)
    try:
        result = evaluate(request, periods.tau, settings)
    except TruncationBudgetExceeded as e:
        if order == 2:
            raise HessianUnavailable(str(e)) from e
        raise
    A = np.linalg.inv(2 * periods.omega1)
    grad = A.T @ result.grad
    hessian = A.T @ result.hessian @ A if result.hessian is not None else None
    y = z.imag
    scale = float(np.exp(-np.pi * y @ periods.tau.Y_inv @ y))
    return StratumPoint(points=list(points), z=z, value=result.value, grad=grad, hessian=hessian,
                        scale=scale, stratum_regular=stratum_regular(spec, len(points)))


def stratum_vanishing(spec: CurveSpec, periods: PeriodData, constant: RiemannConstantData,
                      points: Sequence[PointOnCurve], diff: Optional[DifferentialData] = None,
                      settings: Settings = DEFAULT_SETTINGS) -> float:
    """|theta(w(D) + xi)| in its lattice-invariant form; W_k + xi lies in Theta for k <= g - 1."""
    image = abel_divisor(spec, periods, points, diff=diff, settings=settings).normalized
    return theta_modulus(image + constant.xi, periods.tau, settings=settings)


def _denominator(point: StratumPoint, index: int, settings: Settings) -> float:
    value = point.modulus(point.grad[index])
    if value <= settings.denominator_tol:
        raise ThetaDenominatorVanishes(
            f"|d_{index + 1} theta| = {value:.3e} at the Abel image; the divisor sits near W^1_{len(point.points)}"
        )
    return value


def jorgenson_check(spec: CurveSpec, periods: PeriodData, constant: RiemannConstantData,
                    points: Sequence[PointOnCurve], a: Sequence[complex], b: Sequence[complex],
                    diff: Optional[DifferentialData] = None,
                    settings: Settings = DEFAULT_SETTINGS) -> InversionReport:
    """
    det[phi(P_i); a] / det[phi(P_i); b] against (a . grad F) / (b . grad F) on W_{g-1} + xi.
    """
    g = spec.genus
    if len(points) != g - 1:
        raise PreconditionFailed(f"Jorgenson's identity takes g - 1 = {g - 1} points, got {len(points)}")
    diff = diff or differential_data(spec)
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)

    ring = ring_of(spec)
    rows = np.array([ring.evaluate_many(diff.phi_hat, P) for P in points], dtype=complex).reshape(len(points), g)
    top = complex(np.linalg.det(np.vstack([rows, a])))
    bottom = complex(np.linalg.det(np.vstack([rows, b])))
    scale = float(np.prod(np.linalg.norm(rows, axis=1))) * float(np.linalg.norm(b))
    if abs(bottom) <= settings.degenerate_factor * scale:
        raise DegenerateConfiguration(f"|det[phi; b]| = {abs(bottom):.3e}; resample the points")

    point = stratum_point(spec, periods, constant, points, diff=diff, settings=settings)
    num = complex(a @ point.grad)
    den = complex(b @ point.grad)
    if point.modulus(den) <= settings.denominator_tol:
        raise DegenerateConfiguration(f"|b . grad theta| = {point.modulus(den):.3e}; resample the points")

    lhs = top / bottom
    rhs = num / den
    return InversionReport(
        check="jorgenson", curve_id=spec.curve_id, k=g - 1, i=0, lhs=lhs, rhs=rhs,
        residual=relative_residual(lhs, rhs, settings=settings),
        gates={"det_b": abs(bottom), "grad_b": point.modulus(den), "stratum_regular": point.stratum_regular},
        conditioning={"det_a": abs(top), "grad_norm": point.modulus(point.grad)},
    )


def jacobi_inversion_rows(spec: CurveSpec, periods: PeriodData, constant: RiemannConstantData,
                          points: Sequence[PointOnCurve], indices: Optional[Sequence[int]] = None,
                          delta_form: bool = False, force: bool = False,
                          hints: Optional[Sequence[Optional[PathHint]]] = None,
                          diff: Optional[DifferentialData] = None,
                          settings: Settings = DEFAULT_SETTINGS) -> List[InversionReport]:
    """
    mu_{k,i-1}(D) = (-1)^{k+1-i} d_i F / d_{k+1} F for a divisor D of degree k < g.

    With `force` a singular stratum is reported instead of refused.
    """
    g = spec.genus
    k = len(points)
    if not 1 <= k < g:
        raise PreconditionFailed(f"theta-ratio inversion needs 1 <= k < g = {g}, got k = {k}")
    indices = list(indices) if indices is not None else list(range(1, k + 1))
    if any(not 1 <= i <= k for i in indices):
        raise PreconditionFailed(f"coefficient indices must lie in 1..{k}, got {indices}")
    diff = diff or differential_data(spec)

    regular = stratum_regular(spec, k)
    if not regular:
        message = (f"stratum W_{k} of {spec.curve_id} meets the singular locus of Theta "
                   f"(g - 1 - k = {g - 1 - k} >= a_min)")
        if not force:
            raise ThetaDenominatorVanishes(message)
        logger.warning("%s; reporting anyway", message)

    # Step 1: determinant side
    try:
        expansion = mu_coefficients(spec, k, points, diff, settings)
    except DegenerateDivisor as e:
        raise SpecialDivisor(e.value, e.threshold) from e

    # Step 2: theta side
    point = stratum_point(spec, periods, constant, points, delta_form=delta_form, hints=hints,
                          diff=diff, settings=settings)
    if force and not regular:
        denominator = point.modulus(point.grad[k])
    else:
        denominator = _denominator(point, k, settings)

    reports = []
    for i in indices:
        raw = complex(point.grad[i - 1] / point.grad[k])
        rhs = (-1) ** (k + 1 - i) * raw
        lhs = complex(expansion.coefficients[i - 1])
        reports.append(InversionReport(
            check="jacobi_delta" if delta_form else "jacobi", curve_id=spec.curve_id, k=k, i=i,
            lhs=lhs, rhs=rhs, raw=raw, residual=relative_residual(lhs, rhs, settings=settings),
            gates={"psi": abs(expansion.psi), "denominator": denominator,
                   "stratum_regular": regular, "forced": force and not regular},
            conditioning={"fs_condition": expansion.condition, "theta_modulus": point.modulus(point.value)},
        ))
    logger.debug("jacobi rows for %s at k=%d: worst residual %.2e",
                 spec.curve_id, k, max(r.residual for r in reports))
    return reports


def jacobi_inversion_check(spec: CurveSpec, periods: PeriodData, constant: RiemannConstantData,
                           points: Sequence[PointOnCurve], i: int, delta_form: bool = False,
                           hints: Optional[Sequence[Optional[PathHint]]] = None,
                           diff: Optional[DifferentialData] = None,
                           settings: Settings = DEFAULT_SETTINGS) -> InversionReport:
    return jacobi_inversion_rows(spec, periods, constant, points, [i], delta_form=delta_form,
                                 hints=hints, diff=diff, settings=settings)[0]


def is_hyperelliptic_basis(spec: CurveSpec, diff: DifferentialData) -> bool:
    """True when the first g + 1 basis elements are 1, x, ..., x^g."""
    weights = [f.weight for f in diff.extended(spec.genus + 1)]
    return 2 in curve_semigroup(spec) and weights == [2 * j for j in range(spec.genus + 1)]


def symmetric_function_check(spec: CurveSpec, points: Sequence[PointOnCurve],
                             diff: Optional[DifferentialData] = None,
                             settings: Settings = DEFAULT_SETTINGS) -> List[InversionReport]:
    """
    On a hyperelliptic curve mu_g is Mumford's U: mu_{g,j} = e_{g-j}(x_1, ..., x_g).
    """
    diff = diff or differential_data(spec)
    g = spec.genus
    if len(points) != g:
        raise PreconditionFailed(f"symmetric functions need g = {g} points, got {len(points)}")
    if not is_hyperelliptic_basis(spec, diff):
        raise PreconditionFailed(f"{spec.curve_id} has no basis 1, x, ..., x^g")
    try:
        expansion = mu_coefficients(spec, g, points, diff, settings)
    except DegenerateDivisor as e:
        raise SpecialDivisor(e.value, e.threshold) from e

    # elementary symmetric functions from the monic polynomial with roots x_i
    poly = np.poly([complex(P.x) for P in points])
    reports = []
    for j in range(g):
        e = complex(poly[g - j]) * (-1) ** (g - j)
        lhs = complex(expansion.coefficients[j])
        reports.append(InversionReport(
            check="symmetric", curve_id=spec.curve_id, k=g, i=j + 1, lhs=lhs, rhs=e,
            residual=relative_residual(lhs, e, settings=settings),
            gates={"psi": abs(expansion.psi)}, conditioning={"fs_condition": expansion.condition},
        ))
    return reports


def mu_expansion_check(spec: CurveSpec, points: Sequence[PointOnCurve], samples: Sequence[PointOnCurve],
                       diff: Optional[DifferentialData] = None,
                       settings: Settings = DEFAULT_SETTINGS) -> InversionReport:
    """The determinant ratio mu_n(P) against its expansion in the canonical-extended basis."""
    diff = diff or differential_data(spec)
    n = len(points)
    try:
        expansion = mu_coefficients(spec, n, points, diff, settings)
    except DegenerateDivisor as e:
        raise SpecialDivisor(e.value, e.threshold) from e
    worst, lhs_worst, rhs_worst = 0.0, 0j, 0j
    for P in samples:
        lhs = mu(spec, n, P, points, diff, settings)
        rhs = expansion.evaluate(spec, P)
        residual = relative_residual(lhs, rhs, settings=settings)
        if residual >= worst:
            worst, lhs_worst, rhs_worst = residual, lhs, rhs
    return InversionReport(
        check="mu_expansion", curve_id=spec.curve_id, k=n, i=0, lhs=lhs_worst, rhs=rhs_worst,
        residual=worst, gates={"psi": abs(expansion.psi)}, conditioning={"fs_condition": expansion.condition},
    )


def mu_g_expansion_check(spec: CurveSpec, periods: PeriodData, constant: RiemannConstantData,
                         points: Sequence[PointOnCurve], samples: Optional[Sequence[PointOnCurve]] = None,
                         seed: int = 0, diff: Optional[DifferentialData] = None,
                         settings: Settings = DEFAULT_SETTINGS) -> InversionReport:
    """
    mu_{g-1}(P; P_1..P_{g-1}) against sum_{i=1..g} (d_i F / d_g F) phi_{i-1}(P).

    The residual is the worst over the sample points. The same sum with
    d_{g-1} F as denominator is reported as `alternate_residual` under
    `conditioning`.
    """
    g = spec.genus
    if len(points) != g - 1:
        raise PreconditionFailed(f"the mu_g expansion takes g - 1 = {g - 1} points, got {len(points)}")
    diff = diff or differential_data(spec)
    if samples is None:
        samples = random_points(spec, np.random.default_rng(seed), SAMPLE_POINTS, settings)

    point = stratum_point(spec, periods, constant, points, diff=diff, settings=settings)
    denominator = _denominator(point, g - 1, settings)
    ratios = point.grad / point.grad[g - 1]
    ring = ring_of(spec)
    n = g - 1
    psi = fs_matrix(spec, points, diff).det()

    worst, worst_alt, lhs_worst, rhs_worst = 0.0, 0.0, 0j, 0j
    for P in samples:
        values = ring.evaluate_many(diff.phi_hat, P)
        lhs = mu(spec, n, P, points, diff, settings)
        terms = ratios * values
        rhs = complex(np.sum(terms))
        residual = relative_residual(lhs, rhs, float(np.max(np.abs(terms))), settings)
        if residual >= worst:
            worst, lhs_worst, rhs_worst = residual, lhs, rhs
        if g > 1 and abs(point.grad[g - 2]) > 0:
            alt = complex(np.sum(point.grad / point.grad[g - 2] * values))
            worst_alt = max(worst_alt, relative_residual(lhs, alt, settings=settings))

    if worst_alt > worst:
        logger.debug("mu_g expansion on %s: the d_{g-1} reading disagrees (%.2e vs %.2e)",
                     spec.curve_id, worst_alt, worst)
    return InversionReport(
        check="mu_g_expansion", curve_id=spec.curve_id, k=n, i=g, lhs=lhs_worst, rhs=rhs_worst,
        residual=worst, gates={"psi": abs(psi), "denominator": denominator,
                               "stratum_regular": point.stratum_regular},
        conditioning={"samples": float(len(samples)), "alternate_residual": worst_alt},
    )


def pentagonal_check(spec: CurveSpec, periods: PeriodData, constant: RiemannConstantData,
                     P: PointOnCurve, force: bool = False, hints: Optional[Sequence[Optional[PathHint]]] = None,
                     diff: Optional[DifferentialData] = None,
                     settings: Settings = DEFAULT_SETTINGS) -> InversionReport:
    """
    The k = 1 statement d_1 F / d_2 F against phi_1(P) / phi_0(P) (w / y on the pentagonal curve).
    """
    report = jacobi_inversion_rows(spec, periods, constant, [P], [1], force=force, hints=hints,
                                   diff=diff, settings=settings)[0]
    report.check = "pentagonal"
    return report


def _curve_step(model, x: complex, step: complex) -> Optional[complex]:
    """A step direction from x that stays on one sheet both ways, or None."""
    for turn in (1, 1j, -1j, np.exp(0.25j * np.pi), np.exp(-0.25j * np.pi)):
        h = step * turn
        if not model.crossings(x - h, x + h):
            return h
    return None


def burgers_residual(spec: CurveSpec, periods: PeriodData, constant: RiemannConstantData,
                     P: PointOnCurve, i: int = 1, j: int = 2, step: float = 1e-3,
                     diff: Optional[DifferentialData] = None,
                     settings: Settings = DEFAULT_SETTINGS) -> InversionReport:
    """
    Burgers relation for R = d_1 F / d_2 F on W_1 + xi, where R = -x.

    Along the stratum du = (phi(P) / h(P)) dx, so d_{u_i} R = D_x R h / phi_{i-1}
    with D_x R = grad_u R . phi(P) / h(P) from the theta Hessian. lhs and rhs
    are d_{u_i} R and (phi_{j-1} / phi_{i-1}) d_{u_j} R, equal by the chain
    rule (`checks["relation"]`). The residual is the worse of D_x R against
    the closed value -1 and against a central difference of theta ratios
    along the curve.
    """
    g = spec.genus
    if g < 2:
        raise PreconditionFailed("the Burgers relation needs genus >= 2")
    if not (1 <= i <= g and 1 <= j <= g):
        raise PreconditionFailed(f"indices must lie in 1..{g}, got ({i}, {j})")
    diff = diff or differential_data(spec)
    ring = ring_of(spec)

    # Step 1: phi_1 = x phi_0 on a few points besides P
    samples = [P] + random_points(spec, np.random.default_rng(0), 2, settings)
    for Q in samples:
        phi0, phi1 = ring.evaluate_many(diff.phi_hat[:2], Q)
        if abs(phi1 - Q.x * phi0) > 1e-9 * max(abs(phi1), abs(Q.x * phi0), 1.0):
            raise PreconditionFailed(f"{spec.curve_id} does not satisfy phi_1 = x phi_0")
    if not stratum_regular(spec, 1):
        raise ThetaDenominatorVanishes(f"stratum W_1 of {spec.curve_id} is singular in Theta")

    # Step 2: chain rule through the Hessian
    point = stratum_point(spec, periods, constant, [P], order=2, diff=diff, settings=settings)
    F1, F2 = point.grad[0], point.grad[1]
    if point.modulus(F2) <= settings.denominator_tol:
        raise DegenerateConfiguration(f"|d_2 theta| = {point.modulus(F2):.3e} at the Abel image")
    H = point.hessian
    grad_R = (H[0, :] * F2 - F1 * H[1, :]) / F2 ** 2
    phi = ring.evaluate_many(diff.phi_hat, P)
    h = ring.evaluate(diff.h, P)
    D_x = complex(grad_R @ phi / h)
    partial = lambda index: D_x * h / phi[index - 1]
    lhs = partial(i)
    rhs = (phi[j - 1] / phi[i - 1]) * partial(j)

    # Step 3: central difference of R along the curve
    checks = {"relation": relative_residual(lhs, rhs, settings=settings), "analytic": float(abs(D_x + 1))}
    model = sheet_model(spec)
    dx = _curve_step(model, complex(P.x), step * model.spread)
    if dx is None:
        raise DegenerateConfiguration("no short single-sheet step around P")
    integrand = FormIntegrand(model, diff.forms())
    ratios = []
    for sign in (1, -1):
        piece = adaptive_integrate(integrand.segment(P.x, P.x + sign * dx, P.sheet), settings=settings).value
        z = point.z + periods.normalize(piece)
        grad = evaluate(ThetaRequest(z, 1, settings.theta_eps), periods.tau, settings).grad
        grad = np.linalg.inv(2 * periods.omega1).T @ grad
        ratios.append(grad[0] / grad[1])
    fd = complex((ratios[0] - ratios[1]) / (2 * dx))
    checks["finite_difference"] = relative_residual(D_x, fd, settings=settings)
    residual = max(checks["analytic"], checks["finite_difference"])

    return InversionReport(
        check="burgers", curve_id=spec.curve_id, k=1, i=i, lhs=lhs, rhs=rhs, residual=residual,
        raw=D_x, checks=checks,
        gates={"denominator": point.modulus(F2), "j": j},
        conditioning={"step": abs(dx), "theta_modulus": point.modulus(point.value)},
    )


def inversion_rows(spec: CurveSpec, periods: PeriodData, constant: RiemannConstantData,
                   rng: np.random.Generator, diff: Optional[DifferentialData] = None,
                   settings: Settings = DEFAULT_SETTINGS) -> List[InversionReport]:
    """
    Every k = 1..g row for one random divisor: theta ratios for k < g, and
    for k = g the symmetric functions (hyperelliptic) or the mu expansion.
    """
    diff = diff or differential_data(spec)
    g = spec.genus
    points = random_points(spec, rng, g, settings)
    rows = []
    for k in range(1, g):
        if not stratum_regular(spec, k):
            logger.warning("skipping k=%d on %s: singular stratum", k, spec.curve_id)
            continue
        rows.extend(jacobi_inversion_rows(spec, periods, constant, points[:k], diff=diff, settings=settings))
    if is_hyperelliptic_basis(spec, diff):
        rows.extend(symmetric_function_check(spec, points, diff, settings))
    else:
        samples = random_points(spec, rng, SAMPLE_POINTS, settings)
        rows.append(mu_expansion_check(spec, points, samples, diff, settings))
    return rows

# wstrata/services/pipeline/stages.py

import logging
import os

import numpy as np

from wstrata.curve import (
    CyclicCurveSpec,
    PlaneWeierstrassSpec,
    curve_semigroup,
    differential_data,
    monomial_basis,
    random_points,
    validate_normal_form,
)
from wstrata.exceptions import (
    BranchClearanceViolated,
    DegenerateConfiguration,
    DegenerateDivisor,
    PeriodError,
    PreconditionFailed,
    ThetaDenominatorVanishes,
)
from wstrata.inversion import (
    burgers_residual,
    inversion_rows,
    jacobi_inversion_rows,
    jorgenson_check,
    mu_g_expansion_check,
    pentagonal_check,
    relative_residual,
    stratum_regular,
    stratum_vanishing,
)
from wstrata.periods_abel import (
    PathHint,
    canonical_class_residual,
    half_period_distance,
    lattice_consistency,
    period_matrices,
    riemann_constant,
)
from wstrata.riemann_theta import Characteristic, theta, theta_char, theta_grad
from wstrata.semigroup import is_symmetric, normal_form_profile, schubert_data, young_diagram_rows
from wstrata.services.managers.periods import PeriodCacheManager

logger = logging.getLogger(__name__)

TABLE_WEIGHT_BOUND = 24
RESAMPLE_ATTEMPTS = 5
PENTAGONAL_POINTS = 3
RESAMPLE = (DegenerateConfiguration, DegenerateDivisor, ThetaDenominatorVanishes)


def _rng(pipeline, stage: str) -> np.random.Generator:
    """Per-stage generator so a stage draws the same numbers whatever ran before it."""
    offset = sum(stage.encode())
    return np.random.default_rng([pipeline.config.seed, offset])


def _cyclic(pipeline, stage: str) -> CyclicCurveSpec:
    if not isinstance(pipeline.spec, CyclicCurveSpec):
        raise PeriodError(f"stage {stage} needs a cyclic curve, {pipeline.spec.curve_id} is a plane curve")
    return pipeline.spec


def _resampled(check, attempts: int = RESAMPLE_ATTEMPTS):
    """Call check() until it stops hitting a degenerate configuration."""
    last = None
    for _ in range(attempts):
        try:
            return check()
        except RESAMPLE as e:
            logger.debug("resampling after %s", e)
            last = e
    raise last


def semigroup_stage(pipeline):
    spec = pipeline.spec
    H = curve_semigroup(spec)
    data = schubert_data(H)
    profile = normal_form_profile(H)
    record = {
        "generators": list(H.generators),
        "genus": H.genus,
        "gaps": list(H.gaps),
        "a_min": H.a_min,
        "frobenius": H.frobenius(),
        "symmetric": is_symmetric(H),
        "young": list(data.young),
        "m_seq": list(profile.m_seq),
        "degree_bounds": list(profile.degree_bounds),
    }
    if isinstance(spec, PlaneWeierstrassSpec):
        report = validate_normal_form(spec, seed=pipeline.config.seed)
        record["sheets_resolved"] = report.sheets_resolved
        pipeline.emit("semigroup", record, passed=report.valid)
    else:
        pipeline.emit("semigroup", record)

    name = "<" + ", ".join(str(a) for a in H.generators) + ">"
    gaps = " ".join(str(l) for l in H.gaps)
    rows = [[gaps if i == 0 else "", row] for i, row in enumerate(young_diagram_rows(H))]
    pipeline.table(f"semigroup {name}", ["gaps", "young diagram"], rows or [[gaps, ""]])
    pipeline.logs.append(f"semigroup {name}: genus {H.genus}, {len(H.gaps)} gaps")
    return {"semigroup": H}


def basis_stage(pipeline):
    spec = pipeline.spec
    diff = differential_data(spec)
    elements = monomial_basis(spec, TABLE_WEIGHT_BOUND)
    pipeline.table(f"monomial basis of {spec.curve_id}", ["weight", "element"],
                   [[f.weight, f.label] for f in elements])
    pipeline.table(f"canonical basis of {spec.curve_id} (h = {diff.h.label}, d1 = {diff.d1})",
                   ["i", "weight", "phi_hat"],
                   [[i, f.weight, f.label] for i, f in enumerate(diff.phi_hat)])

    orders = diff.form_orders()
    holomorphic = all(v >= 0 for values in orders.values() for v in values)
    pipeline.emit("basis", {
        "h": diff.h.label,
        "h_weight": diff.h.weight,
        "d1": diff.d1,
        "base_divisor": [[str(place), n] for place, n in diff.B],
        "phi_hat": [[f.label, f.weight] for f in diff.phi_hat],
        "table": {str(f.weight): f.label for f in elements},
    }, passed=holomorphic)
    return {"diff": diff}


def periods_stage(pipeline):
    spec = _cyclic(pipeline, "periods")
    settings = pipeline.settings
    diff = differential_data(spec)
    manager = PeriodCacheManager()
    path = pipeline.config.periods_cache

    if path and os.path.exists(path):
        periods = manager.load(path, spec=spec)
        source = "cache"
    else:
        periods = period_matrices(spec, diff, settings=settings)
        source = "computed"
        if path:
            manager.save(periods, path)

    eigen = float(np.min(np.linalg.eigvalsh(periods.tau.Y)))
    passed = periods.tau.asymmetry < settings.tau_symmetry_tol and eigen > 0
    pipeline.emit("periods", {
        "source": source,
        "genus": periods.genus,
        "tau_asymmetry": periods.tau.asymmetry,
        "min_eig_im_tau": eigen,
        "omega1_condition": periods.condition,
    }, passed=passed)
    if source == "computed":
        change = lattice_consistency(spec, periods, diff, settings)
        pipeline.emit("periods", {"check": "lattice_consistency", "residual": change},
                      passed=change < settings.lattice_tol)
    else:
        pipeline.logs.append(f"lattice consistency skipped for cached periods of {spec.curve_id}")
    pipeline.table(f"tau of {spec.curve_id}", ["row", "entries"],
                   [[i, " ".join(f"{z.real:+.10f}{z.imag:+.10f}i" for z in row)]
                    for i, row in enumerate(periods.tau.tau)])
    pipeline.logs.append(f"periods of {spec.curve_id}: {source}, asymmetry {periods.tau.asymmetry:.2e}")
    return {"periods": periods, "diff": diff}


def theta_stage(pipeline):
    periods = pipeline.need("periods")["periods"]
    settings = pipeline.settings
    tau = periods.tau
    g = tau.g
    rng = _rng(pipeline, "theta")
    worst = {"parity": 0.0, "quasi_periodicity": 0.0, "gradient": 0.0}

    for _ in range(pipeline.config.samples):
        z = rng.normal(size=g) + 0.5j * rng.normal(size=g)
        bits = rng.integers(2, size=2 * g)
        delta = Characteristic.from_bits(bits[:g], bits[g:])
        a, b = theta_char(delta, -z, tau, settings=settings), theta_char(delta, z, tau, settings=settings)
        worst["parity"] = max(worst["parity"], relative_residual(a, delta.parity * b, settings=settings))

        value = theta(z, tau, settings=settings)
        for j in range(g):
            e = np.eye(g)[j]
            shifted = theta(z + e, tau, settings=settings)
            worst["quasi_periodicity"] = max(worst["quasi_periodicity"],
                                             relative_residual(shifted, value, settings=settings))
            shifted = theta(z + tau.tau @ e, tau, settings=settings)
            expected = np.exp(-1j * np.pi * tau.tau[j, j] - 2j * np.pi * z[j]) * value
            worst["quasi_periodicity"] = max(worst["quasi_periodicity"],
                                             relative_residual(shifted, expected, settings=settings))

        direction = rng.normal(size=g)
        h = 1e-5
        fd = (theta(z + h * direction, tau, settings=settings) - theta(z - h * direction, tau, settings=settings)) / (2 * h)
        analytic = complex(theta_grad(z, tau, settings=settings) @ direction)
        worst["gradient"] = max(worst["gradient"], relative_residual(fd, analytic, settings=settings))

    pipeline.emit("theta", {"check": "parity", "residual": worst["parity"]},
                  passed=worst["parity"] < settings.theta_check_tol)
    pipeline.emit("theta", {"check": "quasi_periodicity", "residual": worst["quasi_periodicity"]},
                  passed=worst["quasi_periodicity"] < settings.theta_check_tol)
    pipeline.emit("theta", {"check": "gradient", "residual": worst["gradient"]},
                  passed=worst["gradient"] < 1e-6)
    return worst


def riemann_stage(pipeline):
    spec = _cyclic(pipeline, "riemann")
    output = pipeline.need("periods")
    periods, diff = output["periods"], output["diff"]
    settings = pipeline.settings
    constant = riemann_constant(spec, periods, diff, settings, seed=pipeline.config.seed, allow_unresolved=True)

    record = {
        "xi": [[float(v.real), float(v.imag)] for v in constant.xi],
        "score": constant.score,
        "shift_bits": [list(constant.shift_bits[0]), list(constant.shift_bits[1])],
        "characteristic": str(constant.delta) if constant.delta else None,
        "parity": constant.delta.parity if constant.delta else None,
        "notes": list(constant.notes),
    }
    pipeline.emit("riemann", {"check": "vanishing", **record}, passed=constant.score <= settings.vanishing_tol)

    residual = canonical_class_residual(periods, constant.xi, constant.base_image)
    pipeline.emit("riemann", {"check": "canonical_class", "residual": residual},
                  passed=residual < settings.vanishing_tol)
    if diff.d1 > 0:
        # 2 xi = w(B) must stay off the half-period lattice
        distance = half_period_distance(periods, constant.base_image)
        pipeline.emit("riemann", {"check": "not_half_period", "distance": distance}, passed=distance > 1e-3)

    rng = _rng(pipeline, "riemann")
    for k in range(1, spec.genus - 1):
        points = random_points(spec, rng, k, settings)
        value = stratum_vanishing(spec, periods, constant, points, diff, settings)
        pipeline.emit("riemann", {"check": "stratum_vanishing", "k": k, "residual": value},
                      passed=value < settings.vanishing_tol)
    return {"constant": constant}


def _emit_report(pipeline, stage: str, report, tol: float, gated: bool = True):
    pipeline.emit(stage, report.as_record(), passed=report.worst < tol, gated=gated)
    return report


def invert_stage(pipeline):
    spec = _cyclic(pipeline, "invert")
    output = pipeline.need("periods")
    periods, diff = output["periods"], output["diff"]
    constant = pipeline.need("riemann")["constant"]
    settings = pipeline.settings
    g = spec.genus
    tol = settings.inversion_tol
    rng = _rng(pipeline, "invert")
    reports = []

    for _ in range(pipeline.config.samples):
        rows = _resampled(lambda: inversion_rows(spec, periods, constant, rng, diff, settings))
        reports += [_emit_report(pipeline, "invert", r, tol) for r in rows]

        if g >= 2:
            def jorgenson():
                points = random_points(spec, rng, g - 1, settings)
                a = rng.normal(size=g) + 1j * rng.normal(size=g)
                b = rng.normal(size=g) + 1j * rng.normal(size=g)
                return jorgenson_check(spec, periods, constant, points, a, b, diff, settings)
            reports.append(_emit_report(pipeline, "invert", _resampled(jorgenson), tol))

            def expansion():
                points = random_points(spec, rng, g - 1, settings)
                return mu_g_expansion_check(spec, periods, constant, points, seed=int(rng.integers(1 << 31)),
                                            diff=diff, settings=settings)
            reports.append(_emit_report(pipeline, "invert", _resampled(expansion), tol))

    # delta form against xi form
    if constant.delta is not None and g >= 2 and stratum_regular(spec, 1):
        def agreement():
            points = random_points(spec, rng, 1, settings)
            xi_row = jacobi_inversion_rows(spec, periods, constant, points, diff=diff, settings=settings)[0]
            delta_row = jacobi_inversion_rows(spec, periods, constant, points, delta_form=True,
                                              diff=diff, settings=settings)[0]
            return xi_row, delta_row
        xi_row, delta_row = _resampled(agreement)
        residual = relative_residual(xi_row.raw, delta_row.raw, settings=settings)
        pipeline.emit("invert", {"check": "delta_form", "characteristic": str(constant.delta),
                                 "residual": residual, "lhs": xi_row.as_record()["raw"],
                                 "rhs": delta_row.as_record()["raw"]},
                      passed=residual < settings.agreement_tol)

    # Burgers relation where phi_1 = x phi_0
    if g >= 2:
        try:
            P = random_points(spec, rng, 1, settings)[0]
            report = _resampled(lambda: burgers_residual(spec, periods, constant, P, 1, 2, diff=diff,
                                                         settings=settings))
            reports.append(_emit_report(pipeline, "invert", report, tol))
        except PreconditionFailed as e:
            pipeline.logs.append(f"burgers skipped: {e}")

    pipeline.table(f"inversion checks on {spec.curve_id}", ["check", "k", "i", "residual"],
                   [[r.check, r.k, r.i, f"{r.worst:.3e}"] for r in reports])
    return {"reports": reports}


def pentagonal_stage(pipeline):
    spec = _cyclic(pipeline, "pentagonal")
    output = pipeline.need("periods")
    periods, diff = output["periods"], output["diff"]
    constant = pipeline.need("riemann")["constant"]
    settings = pipeline.settings
    rng = _rng(pipeline, "pentagonal")
    reports = []

    for _ in range(PENTAGONAL_POINTS):
        P = random_points(spec, rng, 1, settings)[0]
        report = pentagonal_check(spec, periods, constant, P, force=True, diff=diff, settings=settings)
        try:
            other = pentagonal_check(spec, periods, constant, P, force=True,
                                     hints=[PathHint(offset=0.5 * np.exp(0.3j))], diff=diff, settings=settings)
            report.checks["path_change"] = relative_residual(report.raw, other.raw, settings=settings)
        except BranchClearanceViolated as e:
            pipeline.logs.append(f"path change skipped: {e}")
        # rows on a singular stratum are reported but do not gate the run
        reports.append(_emit_report(pipeline, "pentagonal", report, settings.pentagonal_tol,
                                    gated=bool(report.gates["stratum_regular"])))

    pipeline.table(f"k = 1 ratio on {spec.curve_id}", ["lhs", "rhs", "residual", "regular"],
                   [[f"{r.lhs:.6g}", f"{r.rhs:.6g}", f"{r.residual:.3e}", r.gates["stratum_regular"]] for r in reports])
    return {"reports": reports}

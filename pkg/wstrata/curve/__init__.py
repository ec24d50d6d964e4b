# wstrata/curve/__init__.py

from wstrata.curve.bases import (
    DifferentialData,
    NumeratorClass,
    canonical_basis,
    differential_data,
    monomial_basis,
)
from wstrata.curve.functions import (
    CurveSpec,
    CyclicRing,
    FunctionExpr,
    PlaneRing,
    Term,
    curve_semigroup,
    evaluate,
    ring_of,
    valuation,
)
from wstrata.curve.sheets import (
    SheetModel,
    branch_point,
    point_near_infinity,
    point_on_curve,
    random_points,
    sheet_model,
)
from wstrata.curve.specs import (
    INFINITY,
    POINT_AT_INFINITY,
    CyclicCurveSpec,
    NormalFormReport,
    Place,
    PlaneWeierstrassSpec,
    PointOnCurve,
    branch_place,
    validate_normal_form,
)

__all__ = [
    "CurveSpec",
    "CyclicCurveSpec",
    "CyclicRing",
    "DifferentialData",
    "FunctionExpr",
    "INFINITY",
    "NormalFormReport",
    "NumeratorClass",
    "POINT_AT_INFINITY",
    "Place",
    "PlaneRing",
    "PlaneWeierstrassSpec",
    "PointOnCurve",
    "SheetModel",
    "Term",
    "branch_place",
    "branch_point",
    "canonical_basis",
    "curve_semigroup",
    "differential_data",
    "evaluate",
    "monomial_basis",
    "point_near_infinity",
    "point_on_curve",
    "random_points",
    "ring_of",
    "sheet_model",
    "valuation",
]

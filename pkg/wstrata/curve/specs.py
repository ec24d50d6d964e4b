# wstrata/curve/specs.py

import logging
from dataclasses import dataclass, field
from math import gcd
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from wstrata.exceptions import CurveError, DegreeBoundViolated, NotCoprime
from wstrata.semigroup import NumericalSemigroup, semigroup_from_generators

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Place:
    """A place of the curve: the point at infinity or the ramified point over a branch point."""
    kind: str
    index: Optional[int] = None

    def __str__(self):
        return "infinity" if self.kind == "infinity" else f"branch[{self.index}]"


INFINITY = Place("infinity")


def branch_place(index: int) -> Place:
    return Place("branch", index)


@dataclass(frozen=True)
class CyclicCurveSpec:
    """
    Cyclic cover y^r = prod (x - b_i)^{m_i}, totally ramified over every b_i and over infinity.

    `branch` holds (b_i, m_i) pairs in the order given by the configuration;
    `b0` optionally lists the halved base divisor as (branch index, multiplicity).
    """
    r: int
    branch: Tuple[Tuple[complex, int], ...]
    name: str = ""
    b0: Optional[Tuple[Tuple[int, int], ...]] = None

    def __post_init__(self):
        if self.r < 2:
            raise CurveError(f"cover degree must be >= 2, got {self.r}")
        if not self.branch:
            raise CurveError("a cyclic curve needs at least one finite branch point")

        points = [complex(b) for b, _ in self.branch]
        for i, (b, m) in enumerate(self.branch):
            if not 0 < m < self.r:
                raise CurveError(f"multiplicity m_{i}={m} must lie in 1..{self.r - 1}")
            if gcd(self.r, m) != 1:
                raise NotCoprime(self.r, m, f"(branch point {i} would not be totally ramified)")
            if any(points[j] == points[i] for j in range(i)):
                raise CurveError(f"branch point {b} is repeated")
        if gcd(self.r, self.s) != 1:
            raise NotCoprime(self.r, self.s, "(infinity would not be a single place)")
        if (len(self.branch) - 1) * (self.r - 1) % 2:
            raise CurveError("Riemann-Hurwitz gives a non-integral genus")

    @property
    def points(self) -> np.ndarray:
        return np.array([complex(b) for b, _ in self.branch])

    @property
    def mults(self) -> Tuple[int, ...]:
        return tuple(int(m) for _, m in self.branch)

    @property
    def s(self) -> int:
        return sum(m for _, m in self.branch)

    @property
    def genus(self) -> int:
        return (len(self.branch) - 1) * (self.r - 1) // 2

    @property
    def curve_id(self) -> str:
        return self.name or f"cyclic-r{self.r}-n{len(self.branch)}"

    def residual(self, x: complex, y: complex) -> float:
        lhs = y ** self.r
        rhs = np.prod([(x - b) ** m for b, m in self.branch])
        return float(abs(lhs - rhs) / max(1.0, abs(rhs)))


@dataclass(frozen=True)
class PlaneWeierstrassSpec:
    """
    Plane curve y^m + A_1(x) y^{m-1} + ... + A_m(x) = 0 with coeffs[i-1][j] = lambda_{i,j}.
    """
    m: int
    n: int
    coeffs: Tuple[Tuple[complex, ...], ...]
    name: str = ""

    @property
    def genus(self) -> int:
        return (self.m - 1) * (self.n - 1) // 2

    @property
    def curve_id(self) -> str:
        return self.name or f"plane-{self.m}-{self.n}"

    def A(self, i: int, x):
        row = self.coeffs[i - 1] if i - 1 < len(self.coeffs) else ()
        if not row:
            return 0 * np.asarray(x, dtype=complex)
        return np.polyval(list(reversed(row)), x)

    def y_polynomial(self, x: complex) -> List[complex]:
        return [1.0 + 0j] + [complex(self.A(i, x)) for i in range(1, self.m + 1)]

    def f(self, x: complex, y: complex) -> complex:
        return complex(np.polyval(self.y_polynomial(x), y))

    def residual(self, x: complex, y: complex) -> float:
        scale = sum(abs(c) * abs(y) ** (self.m - k) for k, c in enumerate(self.y_polynomial(x)))
        return abs(self.f(x, y)) / max(1.0, scale)


@dataclass(frozen=True)
class PointOnCurve:
    x: complex
    y: complex
    sheet: int = 0
    branch_index: Optional[int] = None
    t: Optional[complex] = None
    at_infinity: bool = False

    @property
    def is_ramified(self) -> bool:
        return self.branch_index is not None

    @property
    def place(self) -> Optional[Place]:
        if self.at_infinity:
            return INFINITY
        if self.branch_index is not None:
            return branch_place(self.branch_index)
        return None


POINT_AT_INFINITY = PointOnCurve(x=complex("inf"), y=complex("inf"), at_infinity=True)


@dataclass
class NormalFormReport:
    m: int
    n: int
    genus: int
    degree_bounds: Tuple[int, ...]
    semigroup: NumericalSemigroup
    sheets_resolved: Optional[bool] = None
    notes: List[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.sheets_resolved is not False


def validate_normal_form(spec: PlaneWeierstrassSpec, sample_trials: int = 20,
                         seed: int = 0) -> NormalFormReport:
    """
    Check degree bounds, coprimality and the leading normalisation of a plane spec.

    The leading coefficient normalised is lambda_{m,n} (the top coefficient
    of A_m). With gcd(m, n) = 1 the curve has one place over infinity and f
    is irreducible, so the root monodromy around a large circle is a single
    m-cycle. Tracking the y-roots around such circles only checks that the
    numerical root matching resolves the sheets for these coefficients.
    """
    m, n = spec.m, spec.n
    if gcd(m, n) != 1:
        raise NotCoprime(m, n)

    # Step 1: degree bounds
    bounds = tuple(i * n // m for i in range(1, m + 1))
    for i in range(1, m + 1):
        row = spec.coeffs[i - 1] if i - 1 < len(spec.coeffs) else ()
        for j, c in enumerate(row):
            if j > bounds[i - 1] and c != 0:
                raise DegreeBoundViolated(i, j, bounds[i - 1])

    # Step 2: leading normalisation of A_m
    top = spec.coeffs[m - 1] if len(spec.coeffs) >= m else ()
    lead = top[n] if len(top) > n else 0
    if abs(lead - 1) > 1e-12:
        raise CurveError(f"lambda[{m},{n}] must be normalised to 1, got {lead}")

    report = NormalFormReport(
        m=m,
        n=n,
        genus=spec.genus,
        degree_bounds=bounds,
        semigroup=semigroup_from_generators([m, n]),
    )
    report.notes.append(f"normalised lambda[{m},{n}] = 1 (top coefficient of A_{m})")

    # Step 3: sheet tracking around infinity
    if sample_trials:
        rng = np.random.default_rng(seed)
        report.sheets_resolved = all(
            _single_cycle(_circle_monodromy(spec, radius_factor=1.5 + rng.random(), phase=2 * np.pi * rng.random()))
            for _ in range(sample_trials)
        )
        if not report.sheets_resolved:
            report.notes.append("root tracking around infinity lost a sheet; raise the circle step count")
    return report


def _circle_monodromy(spec: PlaneWeierstrassSpec, radius_factor: float, phase: float,
                      steps: int = 720) -> List[int]:
    scale = 1.0 + max((abs(c) for row in spec.coeffs for c in row), default=0.0)
    radius = 4.0 * radius_factor * scale ** 2
    start = radius * np.exp(1j * phase)
    roots0 = np.roots(spec.y_polynomial(start))
    current = roots0.copy()
    for step in range(1, steps + 1):
        x = radius * np.exp(1j * (phase + 2 * np.pi * step / steps))
        nxt = np.roots(spec.y_polynomial(x))
        cost = np.abs(current[:, None] - nxt[None, :])
        _, cols = linear_sum_assignment(cost)
        current = nxt[cols]
    cost = np.abs(roots0[:, None] - current[None, :])
    _, cols = linear_sum_assignment(cost)
    return [int(c) for c in cols]


def _single_cycle(perm: List[int]) -> bool:
    seen, j = 0, 0
    while True:
        j = perm[j]
        seen += 1
        if j == 0:
            break
    return seen == len(perm)

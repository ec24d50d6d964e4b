# wstrata/curve/bases.py

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from wstrata.config import DEFAULT_SETTINGS, Settings
from wstrata.curve.functions import (
    CurveSpec,
    CyclicRing,
    FunctionExpr,
    PlaneRing,
    Term,
    curve_semigroup,
    ring_of,
)
from wstrata.curve.specs import INFINITY, CyclicCurveSpec, Place, branch_place
from wstrata.exceptions import BasisGapUnfillable, CurveError, DenominatorSearchExhausted

logger = logging.getLogger(__name__)


def monomial_basis(spec: CurveSpec, weight_bound: int) -> List[FunctionExpr]:
    """
    Weight-ordered basis S_R of the affine ring, cut at `weight_bound`.

    Cyclic curves use the normal basis x^j y_k over the residue classes,
    plane curves the monomials x^a y^b with b < m. Every semigroup element
    up to the bound must be hit exactly once.
    """
    if weight_bound < 0:
        raise ValueError("weight_bound must be non-negative")

    ring = ring_of(spec)
    elements = _ring_elements(ring, weight_bound)
    elements.sort(key=lambda f: f.weight)

    H = curve_semigroup(spec)
    expected = H.elements(weight_bound)
    found = [f.weight for f in elements]
    for w in expected:
        if w not in found:
            raise BasisGapUnfillable(w)
    if len(found) != len(set(found)) or len(found) != len(expected):
        raise BasisGapUnfillable(next(w for w in found if found.count(w) > 1 or w not in expected))
    return elements


def _ring_elements(ring, bound: int) -> List[FunctionExpr]:
    elements = []
    if isinstance(ring, CyclicRing):
        for k in range(ring.r):
            wk = ring.class_weight(k) if k else 0
            j = 0
            while ring.r * j + wk <= bound:
                elements.append(ring.class_element(k, j))
                j += 1
    else:
        for b in range(ring.m):
            a = 0
            while ring.m * a + ring.n * b <= bound:
                elements.append(ring.monomial(x=a, y=b))
                a += 1
    return elements


@dataclass(frozen=True)
class NumeratorClass:
    """Numerators Q(x) x^j y_k with Q = prod (x-b_i)^{E_i}; `count` of them are holomorphic."""
    k: int
    E: Tuple[int, ...]
    count: int


@dataclass
class DifferentialData:
    """
    Denominator h, canonical numerators phi_hat and the base divisor B of dx/h.

    (dx/h) = (2g - 2 + d1) infinity - B. For cyclic curves `classes` keeps the
    numerator shape per residue class so the canonical basis can be
    continued past the first g elements.
    """
    spec: CurveSpec
    h: FunctionExpr
    phi_hat: List[FunctionExpr]
    d1: int
    B: List[Tuple[Place, int]]
    classes: Tuple[NumeratorClass, ...] = ()
    _extended: List[FunctionExpr] = field(default_factory=list, repr=False)

    @property
    def genus(self) -> int:
        return len(self.phi_hat)

    @property
    def h_term(self) -> Term:
        return self.h.terms[0]

    def extended(self, n: int) -> List[FunctionExpr]:
        """First n elements of the canonical-extended basis (phi_hat first, then weight order)."""
        if n <= self.genus:
            return self.phi_hat[:n]
        if len(self._extended) < n:
            bound = self.phi_hat[-1].weight
            while True:
                bound += 2 * max(self.genus, 1) + 8
                if isinstance(self.spec, CyclicCurveSpec):
                    elements = _class_elements(ring_of(self.spec), self.classes, bound)
                else:
                    elements = monomial_basis(self.spec, bound)
                if len(elements) >= n:
                    break
            self._extended = elements
        return self._extended[:n]

    def forms(self) -> List[Term]:
        """nu_j = phi_hat_j / h as single terms; x^a is folded into (x - 0)^a when 0 is a branch point."""
        ring = ring_of(self.spec)
        if not isinstance(ring, CyclicRing):
            raise CurveError("single-term forms exist only on cyclic curves")
        h = self.h_term
        forms = []
        for phi in self.phi_hat:
            t = phi.terms[0]
            if len(phi.terms) != 1:
                raise CurveError(f"numerator {phi.label} is not a single term")
            branch = [p - q for p, q in zip(t.branch, h.branch)]
            a = t.a
            if ring.zero_branch:
                branch[ring.zero_branch[0]] += a
                a = 0
            forms.append(Term(t.coef / h.coef, a, t.b - h.b, tuple(branch)))
        return forms

    def form_orders(self) -> Dict[Place, List[int]]:
        """Order of phi_hat_j dx / h at every special place."""
        ring = ring_of(self.spec)
        wt_h = self.h.weight
        if isinstance(ring, PlaneRing):
            return {INFINITY: [wt_h - phi.weight - ring.m - 1 for phi in self.phi_hat]}
        orders = {INFINITY: [wt_h - ring.weight(phi) - ring.r - 1 for phi in self.phi_hat]}
        for i in range(len(ring.points)):
            place = branch_place(i)
            vh = ring.valuation(self.h, place)
            orders[place] = [ring.valuation(phi, place) + ring.r - 1 - vh for phi in self.phi_hat]
        return orders


def _class_elements(ring: CyclicRing, classes: Sequence[NumeratorClass], bound: int) -> List[FunctionExpr]:
    elements = []
    for nc in classes:
        Q = ring.branch_factor(nc.E)
        j = 0
        while True:
            element = ring.class_element(nc.k, j)
            if any(nc.E):
                element = Q * element if element.label != "1" else Q
            if element.weight > bound:
                break
            elements.append(element)
            j += 1
    elements.sort(key=lambda f: f.weight)
    return elements


def canonical_basis(spec: CurveSpec, settings: Settings = DEFAULT_SETTINGS) -> DifferentialData:
    if spec.genus < 1:
        raise CurveError("canonical basis needs genus >= 1")
    ring = ring_of(spec)
    if isinstance(ring, PlaneRing):
        return _plane_canonical(ring)
    return _cyclic_canonical(ring, settings)


def _plane_canonical(ring: PlaneRing) -> DifferentialData:
    g = ring.spec.genus
    h = ring.f_y()
    bound = 2 * g - 2
    phi_hat = monomial_basis(ring.spec, bound)[:g]
    d1 = h.weight - ring.m - 1 - (2 * g - 2)
    logger.debug("plane canonical basis for %s: h = f_y, d1 = %d", ring.spec.curve_id, d1)
    return DifferentialData(spec=ring.spec, h=h, phi_hat=phi_hat, d1=d1, B=[])


def _compositions(n: int, total: int) -> Iterator[Tuple[int, ...]]:
    if n == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(n - 1, total - first):
            yield (first,) + rest


def _denominators(ring: CyclicRing, budget: int) -> Iterator[Tuple[int, int, Tuple[int, ...]]]:
    """(weight, k, c) for h = prod (x-b_i)^{c_i} y^k in R, weight ascending."""
    N = len(ring.mults)
    for w in range(budget + 1):
        k = next(k for k in range(ring.r) if (k * ring.s - w) % ring.r == 0)
        lo = tuple(-(k * m // ring.r) for m in ring.mults)
        total = (w - k * ring.s) // ring.r - sum(lo)
        if total < 0:
            continue
        candidates = [tuple(d + l for d, l in zip(comp, lo)) for comp in _compositions(N, total)]
        candidates.sort(key=lambda c: (sum(e * e for e in c), c))
        for c in candidates:
            yield w, k, c


def _numerator_classes(ring: CyclicRing, w: int, k: int, c: Tuple[int, ...]) -> Tuple[NumeratorClass, ...]:
    r = ring.r
    vh = [r * ci + k * m for ci, m in zip(c, ring.mults)]
    classes = []
    for kk in range(r):
        wk = ring.class_weight(kk) if kk else 0
        E = tuple(max(0, -((-(v - (r - 1) - (kk * m) % r)) // r)) for v, m in zip(vh, ring.mults))
        D = (w - r - 1 - wk) // r
        classes.append(NumeratorClass(kk, E, max(0, D - sum(E) + 1)))
    return tuple(classes)


def _cyclic_canonical(ring: CyclicRing, settings: Settings) -> DifferentialData:
    spec = ring.spec
    g, r = spec.genus, ring.r
    budget = settings.denominator_budget or 4 * g + r * len(ring.mults) + ring.s + r

    chosen: Optional[Tuple[int, int, Tuple[int, ...], Tuple[NumeratorClass, ...]]] = None
    fallback = None
    for w, k, c in _denominators(ring, budget):
        vh = [r * ci + k * m for ci, m in zip(c, ring.mults)]
        if any(v < r - 1 for v in vh):
            continue
        classes = _numerator_classes(ring, w, k, c)
        if sum(nc.count for nc in classes) != g:
            continue
        monomial = all(not any(nc.E) for nc in classes if nc.count)
        if fallback is None:
            fallback = (w, k, c, classes)
            if not settings.monomial_first:
                break
        if monomial:
            chosen = (w, k, c, classes)
            break
    chosen = chosen or fallback
    if chosen is None:
        raise DenominatorSearchExhausted(budget)

    w, k, c, classes = chosen
    h_label = "".join(f"(x-b{i})" + (f"^{e}" if e != 1 else "") for i, e in enumerate(c) if e)
    h_label += ("y" if k == 1 else f"y^{k}") if k else ""
    h = FunctionExpr((Term(1.0 + 0j, 0, k, c),), label=h_label or "1", weight=w)

    phi_hat = _class_elements(ring, classes, w - r - 1)
    if len(phi_hat) != g:
        raise CurveError(f"denominator {h.label} gave {len(phi_hat)} numerators, expected {g}")

    d1 = w - r - 1 - (2 * g - 2)
    B = [(branch_place(i), r * ci + k * m - (r - 1)) for i, (ci, m) in enumerate(zip(c, ring.mults))]
    B = [(place, mult) for place, mult in B if mult]
    if sum(mult for _, mult in B) != d1:
        raise CurveError(f"base divisor degree {sum(mult for _, mult in B)} differs from d1 = {d1}")

    logger.debug("canonical basis for %s: h = %s (wt %d), d1 = %d, numerators %s",
                 spec.curve_id, h.label, w, d1, ", ".join(f.label for f in phi_hat))
    return DifferentialData(spec=spec, h=h, phi_hat=phi_hat, d1=d1, B=B, classes=classes)


@lru_cache(maxsize=32)
def differential_data(spec: CurveSpec) -> DifferentialData:
    """canonical_basis under the default settings, cached per spec."""
    return canonical_basis(spec)

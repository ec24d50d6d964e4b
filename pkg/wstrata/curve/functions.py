# wstrata/curve/functions.py

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from wstrata.curve.specs import (
    INFINITY,
    CyclicCurveSpec,
    Place,
    PlaneWeierstrassSpec,
    PointOnCurve,
)
from wstrata.exceptions import CancellationDetected, PoleAtPoint, UnsupportedPlace
from wstrata.semigroup import NumericalSemigroup, semigroup_from_generators

logger = logging.getLogger(__name__)

CurveSpec = Union[CyclicCurveSpec, PlaneWeierstrassSpec]

GENERATOR_NAMES = ("y", "w", "v", "u", "q", "p", "o")


@dataclass(frozen=True)
class Term:
    """coef * x^a * y^b * prod (x - b_i)^{branch[i]}; plane curves leave `branch` empty."""
    coef: complex
    a: int
    b: int
    branch: Tuple[int, ...] = ()

    @property
    def key(self):
        return (self.a, self.b, self.branch)


@dataclass(frozen=True)
class FunctionExpr:
    terms: Tuple[Term, ...]
    label: str = ""
    weight: Optional[int] = None

    @classmethod
    def constant(cls, value: complex = 1.0, nbranch: int = 0) -> "FunctionExpr":
        return cls((Term(complex(value), 0, 0, (0,) * nbranch),), label="1", weight=0)

    def simplified(self) -> "FunctionExpr":
        merged: Dict[tuple, complex] = {}
        for t in self.terms:
            merged[t.key] = merged.get(t.key, 0) + t.coef
        terms = tuple(Term(c, a, b, br) for (a, b, br), c in merged.items() if c != 0)
        return FunctionExpr(terms, self.label, self.weight)

    def __mul__(self, other: "FunctionExpr") -> "FunctionExpr":
        terms = tuple(
            Term(
                s.coef * o.coef,
                s.a + o.a,
                s.b + o.b,
                tuple(p + q for p, q in zip(s.branch, o.branch)),
            )
            for s in self.terms
            for o in other.terms
        )
        label = f"{self.label}{other.label}" if self.label and other.label else ""
        weight = self.weight + other.weight if self.weight is not None and other.weight is not None else None
        return FunctionExpr(terms, label, weight).simplified()

    def __add__(self, other: "FunctionExpr") -> "FunctionExpr":
        return FunctionExpr(self.terms + other.terms).simplified()

    def scaled(self, c: complex) -> "FunctionExpr":
        return FunctionExpr(tuple(Term(t.coef * c, t.a, t.b, t.branch) for t in self.terms), self.label, self.weight)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1


@dataclass(frozen=True)
class Generator:
    """Normalisation generator y^k / prod (x - b_i)^{floors[i]} of a cyclic curve."""
    name: str
    k: int
    floors: Tuple[int, ...]
    weight: int


class CyclicRing:
    """
    Affine ring of a cyclic curve presented through its residue-class generators.

    Class k (1 <= k < r) is spanned over C[x] by y_k = y^k / prod (x-b_i)^{floor(k m_i/r)};
    y_k is written as a product of earlier generators when the floor
    corrections add up, otherwise it becomes a new named generator.
    """

    def __init__(self, spec: CyclicCurveSpec):
        self.spec = spec
        self.r = spec.r
        self.s = spec.s
        self.mults = spec.mults
        self.points = spec.points
        self.zero_branch = tuple(i for i, b in enumerate(self.points) if b == 0)
        self.generators: List[Generator] = []
        self.class_exponents: Dict[int, Tuple[int, ...]] = {0: ()}
        self._build_generators()

    def _floors(self, k: int) -> Tuple[int, ...]:
        return tuple(k * m // self.r for m in self.mults)

    def class_weight(self, k: int) -> int:
        return k * self.s - self.r * sum(self._floors(k))

    def _build_generators(self):
        for k in range(1, self.r):
            floors = self._floors(k)
            split = None
            for a in range(1, k // 2 + 1):
                sa, sb = self._floors(a), self._floors(k - a)
                if all(p + q == f for p, q, f in zip(sa, sb, floors)):
                    split = (a, k - a)
                    break
            if split is None:
                gen = Generator(GENERATOR_NAMES[len(self.generators)], k, floors, self.class_weight(k))
                self.generators.append(gen)
                exps = [0] * len(self.generators)
                exps[-1] = 1
            else:
                ea = list(self.class_exponents[split[0]])
                eb = list(self.class_exponents[split[1]])
                size = len(self.generators)
                ea += [0] * (size - len(ea))
                eb += [0] * (size - len(eb))
                exps = [p + q for p, q in zip(ea, eb)]
            self.class_exponents[k] = tuple(exps)
        size = len(self.generators)
        for k, exps in self.class_exponents.items():
            self.class_exponents[k] = tuple(exps) + (0,) * (size - len(exps))
        logger.debug("generators for %s: %s", self.spec.curve_id,
                     ", ".join(f"{g.name}=y^{g.k}/k{g.floors} (wt {g.weight})" for g in self.generators))

    # construction

    def monomial(self, coef: complex = 1.0, **exponents) -> FunctionExpr:
        """x^a * prod g^e for generator names given as keyword exponents (x=..., y=..., w=...)."""
        a = exponents.pop("x", 0)
        b = 0
        branch = [0] * len(self.mults)
        weight = self.r * a
        parts = [f"x^{a}" if a > 1 else ("x" if a == 1 else "")]
        for gen in self.generators:
            e = exponents.pop(gen.name, 0)
            if e:
                b += e * gen.k
                branch = [c - e * f for c, f in zip(branch, gen.floors)]
                weight += e * gen.weight
                parts.append(f"{gen.name}^{e}" if e > 1 else gen.name)
        if exponents:
            raise KeyError(f"unknown generators {sorted(exponents)}")
        label = "".join(parts) or "1"
        return FunctionExpr((Term(complex(coef), a, b, tuple(branch)),), label=label, weight=weight)

    def class_element(self, k: int, a: int = 0) -> FunctionExpr:
        """Normal basis element x^a * y_k."""
        names = {gen.name: e for gen, e in zip(self.generators, self.class_exponents[k]) if e}
        return self.monomial(x=a, **names)

    def branch_factor(self, exps: Sequence[int]) -> FunctionExpr:
        label = "".join(f"(x-b{i})" + (f"^{e}" if e != 1 else "") for i, e in enumerate(exps) if e)
        return FunctionExpr(
            (Term(1.0 + 0j, 0, 0, tuple(int(e) for e in exps)),),
            label=label,
            weight=self.r * int(sum(exps)),
        )

    def semigroup(self) -> NumericalSemigroup:
        return semigroup_from_generators([self.r] + [self.class_weight(k) for k in range(1, self.r)])

    # valuation

    def term_valuation(self, t: Term, place: Place) -> int:
        if place.kind == "infinity":
            return -(self.r * (t.a + sum(t.branch)) + self.s * t.b)
        i = place.index
        v = self.r * t.branch[i] + self.mults[i] * t.b
        if i in self.zero_branch:
            v += self.r * t.a
        return v

    def weight(self, f: FunctionExpr) -> int:
        return -self.valuation(f, INFINITY)

    def valuation(self, f: FunctionExpr, place: Place) -> int:
        f = f.simplified()
        if not f.terms:
            raise ValueError("valuation of the zero function")
        vals = [self.term_valuation(t, place) for t in f.terms]
        v = min(vals)
        tied = [t for t, w in zip(f.terms, vals) if w == v]
        if len(tied) > 1 and self._leading_cancels(tied, place, v):
            raise CancellationDetected(place, v)
        return v

    def _leading_cancels(self, tied: List[Term], place: Place, v: int, tol: float = 1e-9) -> bool:
        """Evaluate the tied terms near the place with t^{-v} stripped and test for a vanishing leading coefficient."""
        scale = 1.0 + float(np.max(np.abs(self.points)))
        t = 1e-6 / scale
        if place.kind == "infinity":
            tr = t ** self.r
            unit = np.prod([(1 - b * tr) ** (m / self.r) for b, m in zip(self.points, self.mults)])
            vals = []
            for term in tied:
                br = np.prod([(1 - b * tr) ** c for b, c in zip(self.points, term.branch)])
                vals.append(term.coef * br * unit ** term.b)
        else:
            i = place.index
            bi = self.points[i]
            x = bi + t ** self.r
            others = [j for j in range(len(self.points)) if j != i]
            unit = np.prod([(x - self.points[j]) ** (self.mults[j] / self.r) for j in others])
            vals = []
            for term in tied:
                value = term.coef * unit ** term.b
                value *= np.prod([(x - self.points[j]) ** term.branch[j] for j in others])
                if i not in self.zero_branch:
                    value *= x ** term.a
                vals.append(value)
        total = sum(vals)
        size = sum(abs(z) for z in vals)
        return abs(total) < tol * size

    # evaluation

    def evaluate(self, f: FunctionExpr, P: PointOnCurve) -> complex:
        if P.at_infinity:
            if self.weight(f) > 0:
                raise PoleAtPoint(f.label, INFINITY)
            return complex(sum(t.coef for t in f.terms if self.term_valuation(t, INFINITY) == 0))
        if P.is_ramified:
            return self._evaluate_ramified(f, P.branch_index)
        x, y = complex(P.x), complex(P.y)
        total = 0j
        for t in f.terms:
            value = t.coef * x ** t.a * y ** t.b
            for b, c in zip(self.points, t.branch):
                if c:
                    value *= (x - b) ** c
            total += value
        return total

    def _evaluate_ramified(self, f: FunctionExpr, i: int) -> complex:
        place = Place("branch", i)
        total = 0j
        for t in f.terms:
            v = self.term_valuation(t, place)
            if v < 0:
                raise PoleAtPoint(f.label, place)
            if v > 0:
                continue
            # v == 0 forces r | b, so y^b has a sheet-free limit
            bi = self.points[i]
            value = t.coef * bi ** t.a if i not in self.zero_branch else t.coef
            q = t.b // self.r
            for j, (bj, mj) in enumerate(zip(self.points, self.mults)):
                if j != i:
                    value *= (bi - bj) ** (t.branch[j] + q * mj)
            total += value
        return total

    def evaluate_many(self, funcs: Sequence[FunctionExpr], P: PointOnCurve) -> np.ndarray:
        return np.array([self.evaluate(f, P) for f in funcs], dtype=complex)


class PlaneRing:
    """Affine ring C[x, y]/(f) of a plane Weierstrass curve with monomial basis x^a y^b, b < m."""

    def __init__(self, spec: PlaneWeierstrassSpec):
        self.spec = spec
        self.m = spec.m
        self.n = spec.n

    def monomial(self, coef: complex = 1.0, x: int = 0, y: int = 0) -> FunctionExpr:
        parts = [f"x^{x}" if x > 1 else ("x" if x == 1 else ""), f"y^{y}" if y > 1 else ("y" if y == 1 else "")]
        return FunctionExpr((Term(complex(coef), x, y),), label="".join(parts) or "1",
                            weight=self.m * x + self.n * y)

    def semigroup(self) -> NumericalSemigroup:
        return semigroup_from_generators([self.m, self.n])

    def term_valuation(self, t: Term, place: Place) -> int:
        if place.kind != "infinity":
            raise UnsupportedPlace("plane specs carry valuations at infinity only")
        return -(self.m * t.a + self.n * t.b)

    def weight(self, f: FunctionExpr) -> int:
        return -self.valuation(f, INFINITY)

    def valuation(self, f: FunctionExpr, place: Place) -> int:
        f = f.simplified()
        if not f.terms:
            raise ValueError("valuation of the zero function")
        vals = [self.term_valuation(t, place) for t in f.terms]
        v = min(vals)
        tied = [t for t, w in zip(f.terms, vals) if w == v]
        # y^m ~ -x^n at infinity, so tied exponents differing by q*m pick up (-1)^q
        lead = sum(t.coef * (-1) ** (t.b // self.m) for t in tied)
        if len(tied) > 1 and abs(lead) < 1e-9 * sum(abs(t.coef) for t in tied):
            raise CancellationDetected(place, v)
        return v

    def f_y(self) -> FunctionExpr:
        terms = []
        for i in range(0, self.m):
            power = self.m - i
            row = (1.0,) if i == 0 else (self.spec.coeffs[i - 1] if i - 1 < len(self.spec.coeffs) else ())
            for j, c in enumerate(row):
                if c != 0:
                    terms.append(Term(complex(c) * power, j, power - 1))
        return FunctionExpr(tuple(terms), label="f_y", weight=(self.m - 1) * self.n).simplified()

    def evaluate(self, f: FunctionExpr, P: PointOnCurve) -> complex:
        if P.at_infinity:
            if self.weight(f) > 0:
                raise PoleAtPoint(f.label, INFINITY)
            return complex(sum(t.coef for t in f.terms if t.a == 0 and t.b == 0))
        x, y = complex(P.x), complex(P.y)
        return complex(sum(t.coef * x ** t.a * y ** t.b for t in f.terms))

    def evaluate_many(self, funcs: Sequence[FunctionExpr], P: PointOnCurve) -> np.ndarray:
        return np.array([self.evaluate(f, P) for f in funcs], dtype=complex)


@lru_cache(maxsize=64)
def ring_of(spec: CurveSpec):
    if isinstance(spec, CyclicCurveSpec):
        return CyclicRing(spec)
    return PlaneRing(spec)


def curve_semigroup(spec: CurveSpec) -> NumericalSemigroup:
    return ring_of(spec).semigroup()


def valuation(spec: CurveSpec, f: FunctionExpr, place: Place) -> int:
    return ring_of(spec).valuation(f, place)


def evaluate(spec: CurveSpec, f: FunctionExpr, P: PointOnCurve) -> complex:
    return ring_of(spec).evaluate(f, P)

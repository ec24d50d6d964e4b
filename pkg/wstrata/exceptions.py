# wstrata/exceptions.py


class WStrataError(Exception):
    """Base class for every error raised by wstrata."""


# Semigroups

class SemigroupError(WStrataError):
    pass


class InvalidGenerators(SemigroupError):
    pass


class NotCofinite(SemigroupError):
    def __init__(self, generators, divisor):
        self.generators = tuple(generators)
        self.divisor = divisor
        super().__init__(
            f"generators {self.generators} share the factor {divisor}; the complement is infinite"
        )


class DegenerateGenusZero(SemigroupError):
    def __init__(self, what="operation"):
        super().__init__(f"{what} needs genus >= 1")


class InconsistentSemigroup(SemigroupError):
    def __init__(self, generators, gaps):
        self.generators = tuple(generators)
        self.gaps = tuple(gaps)
        names = ", ".join(map(str, self.generators))
        super().__init__(f"gaps {self.gaps} of <{names}> fail the symmetry cross-check")


# Curves

class CurveError(WStrataError):
    pass


class DegreeBoundViolated(CurveError):
    def __init__(self, i, j, bound):
        self.i = i
        self.j = j
        self.bound = bound
        super().__init__(f"coefficient lambda[{i},{j}] is nonzero but deg A_{i} must be <= {bound}")


class NotCoprime(CurveError):
    def __init__(self, a, b, what=""):
        self.a = a
        self.b = b
        super().__init__(f"gcd({a}, {b}) != 1 {what}".strip())


class CancellationDetected(CurveError):
    def __init__(self, place, expected):
        self.place = place
        self.expected = expected
        super().__init__(
            f"leading terms cancel at {place}; valuation exceeds the term minimum {expected}, simplify the expression"
        )


class BasisGapUnfillable(CurveError):
    def __init__(self, weight):
        self.weight = weight
        super().__init__(f"no regular function of weight {weight} found")


class DenominatorSearchExhausted(CurveError):
    def __init__(self, budget):
        self.budget = budget
        super().__init__(f"no denominator with g holomorphic numerators up to weight {budget}")


class PoleAtPoint(CurveError):
    def __init__(self, label, place):
        self.label = label
        self.place = place
        super().__init__(f"{label or 'function'} has a pole at {place}")


class NearBranchPoint(CurveError):
    def __init__(self, x0, index, distance):
        self.x0 = x0
        self.index = index
        self.distance = distance
        super().__init__(
            f"x0={x0} lies {distance:.3e} from branch point {index}; use branch_point() for ramified points"
        )


class UnsupportedPlace(CurveError):
    pass


# Divisors

class DivisorError(WStrataError):
    pass


class DegenerateDivisor(DivisorError):
    def __init__(self, value, threshold):
        self.value = value
        self.threshold = threshold
        super().__init__(f"|FS determinant| = {abs(value):.3e} below {threshold:.3e}; divisor is special or repeated")


class SpecialDivisor(DegenerateDivisor):
    pass


# Theta

class ThetaError(WStrataError):
    pass


class TruncationBudgetExceeded(ThetaError):
    def __init__(self, radius, cap):
        self.radius = radius
        self.cap = cap
        super().__init__(f"theta needs ellipsoid radius {radius:.2f} above the cap {cap:.2f}")


class HessianUnavailable(ThetaError):
    pass


# Periods and Abel maps

class PeriodError(WStrataError):
    pass


class BranchClearanceViolated(PeriodError):
    def __init__(self, distance, clearance):
        self.distance = distance
        self.clearance = clearance
        super().__init__(f"path passes {distance:.3e} from a branch point (clearance {clearance:.3e})")


class RankDeficientHomology(PeriodError):
    pass


class QuadratureBudgetExceeded(PeriodError):
    def __init__(self, intervals, error):
        self.intervals = intervals
        self.error = error
        super().__init__(f"quadrature stopped after {intervals} intervals with error estimate {error:.3e}")


class TauNotSymmetric(PeriodError):
    def __init__(self, residual, message=""):
        self.residual = residual
        super().__init__(message or f"tau asymmetry {residual:.3e}; homology or quadrature fault")


class PathCrossesBranchCut(PeriodError):
    pass


# Riemann constant

class RiemannConstantError(WStrataError):
    pass


class VanishingTestFailed(RiemannConstantError):
    def __init__(self, score, tolerance):
        self.score = score
        self.tolerance = tolerance
        super().__init__(f"best candidate leaves |theta| = {score:.3e} above {tolerance:.1e}")


class CharacteristicSearchSkipped(RiemannConstantError):
    def __init__(self, genus, limit):
        self.genus = genus
        self.limit = limit
        super().__init__(f"half-period search skipped for genus {genus} (limit {limit})")


# Inversion checks

class InversionError(WStrataError):
    pass


class DegenerateConfiguration(InversionError):
    pass


class ThetaDenominatorVanishes(InversionError):
    pass


class PreconditionFailed(InversionError):
    pass


# Configuration and files

class ConfigError(WStrataError):
    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class ShapeMismatch(WStrataError):
    pass


# Pipeline

class StageFailed(WStrataError):
    def __init__(self, stage, reason):
        self.stage = stage
        self.reason = reason
        super().__init__(f"stage '{stage}' unavailable: {reason}")

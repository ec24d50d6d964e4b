# wstrata/riemann_theta.py

import itertools
import logging
from dataclasses import dataclass, field
from math import comb
from typing import Iterator, Optional, Tuple, Union

import numpy as np
from scipy.special import gamma, gammaincc

from wstrata.config import DEFAULT_SETTINGS, Settings
from wstrata.exceptions import HessianUnavailable, ThetaError, TruncationBudgetExceeded

logger = logging.getLogger(__name__)

RADIUS_STEP = 0.25


class RiemannMatrix:
    """
    Symmetrised Riemann matrix with the factorisation pi Im(tau) = T^T T, T upper triangular.

    `asymmetry` keeps the relative residual max|tau - tau^T| seen on admission
    and `rho` the length of the shortest nonzero vector of the lattice T Z^g.
    """

    def __init__(self, tau):
        tau = np.atleast_2d(np.asarray(tau, dtype=complex))
        if tau.shape[0] != tau.shape[1]:
            raise ThetaError(f"tau must be square, got shape {tau.shape}")
        self.asymmetry = float(np.max(np.abs(tau - tau.T)) / max(1.0, float(np.max(np.abs(tau)))))
        self.tau = 0.5 * (tau + tau.T)
        self.g = tau.shape[0]
        self.Y = self.tau.imag
        try:
            lower = np.linalg.cholesky(np.pi * self.Y)
        except np.linalg.LinAlgError as e:
            raise ThetaError("Im tau is not positive definite") from e
        self.T = lower.T
        self.T_inv = np.linalg.inv(self.T)
        self.T_inv_norm = float(np.linalg.norm(self.T_inv, 2))
        self.Y_inv = np.linalg.inv(self.Y)
        self.rho = self._shortest_vector()

    def _shortest_vector(self) -> float:
        radius = float(np.min(np.linalg.norm(self.T, axis=0))) * (1 + 1e-12)
        points = lattice_points(self.T, np.zeros(self.g), radius)
        lengths = np.linalg.norm((points @ self.T.T), axis=1)
        return float(np.min(lengths[np.any(points != 0, axis=1)]))

    def __repr__(self):
        return f"RiemannMatrix(g={self.g}, rho={self.rho:.4f}, asymmetry={self.asymmetry:.2e})"


TauLike = Union[RiemannMatrix, np.ndarray]


def as_riemann_matrix(tau: TauLike) -> RiemannMatrix:
    return tau if isinstance(tau, RiemannMatrix) else RiemannMatrix(tau)


@dataclass(frozen=True)
class Characteristic:
    """Half-integer characteristic delta = [delta', delta''] with entries in {0, 1/2}."""
    delta1: Tuple[float, ...]
    delta2: Tuple[float, ...]

    def __post_init__(self):
        if len(self.delta1) != len(self.delta2):
            raise ThetaError("characteristic halves differ in length")
        for d in self.delta1 + self.delta2:
            if d not in (0, 0.5):
                raise ThetaError(f"characteristic entries must be 0 or 1/2, got {d}")

    @classmethod
    def zero(cls, g: int) -> "Characteristic":
        return cls((0.0,) * g, (0.0,) * g)

    @classmethod
    def from_bits(cls, bits1, bits2) -> "Characteristic":
        return cls(tuple(0.5 * int(b) for b in bits1), tuple(0.5 * int(b) for b in bits2))

    @property
    def g(self) -> int:
        return len(self.delta1)

    @property
    def parity(self) -> int:
        """e(delta) = exp(4 pi i delta'.delta''), +1 even, -1 odd."""
        return -1 if round(4 * sum(a * b for a, b in zip(self.delta1, self.delta2))) % 2 else 1

    def __str__(self):
        bits = lambda d: "".join(str(int(2 * x)) for x in d)
        return f"[{bits(self.delta1)};{bits(self.delta2)}]"


def characteristics(g: int) -> Iterator[Characteristic]:
    for bits in itertools.product((0, 1), repeat=2 * g):
        yield Characteristic.from_bits(bits[:g], bits[g:])


def parity_counts(g: int) -> Tuple[int, int]:
    even = sum(1 for d in characteristics(g) if d.parity == 1)
    return even, 4 ** g - even


@dataclass
class ThetaRequest:
    z: np.ndarray
    order: int = 0
    eps: float = DEFAULT_SETTINGS.theta_eps
    delta: Optional[Characteristic] = None

    def __post_init__(self):
        self.z = np.atleast_1d(np.asarray(self.z, dtype=complex))
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.order not in (0, 1, 2):
            raise ValueError(f"derivative order must be 0, 1 or 2, got {self.order}")


@dataclass
class ThetaResult:
    value: complex
    grad: Optional[np.ndarray] = None
    hessian: Optional[np.ndarray] = None
    radius: float = 0.0
    bound: float = 0.0
    npoints: int = 0
    shift: Tuple[Tuple[int, ...], Tuple[int, ...]] = field(default_factory=lambda: ((), ()))


def lattice_points(T: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    """
    Integer vectors n with ||T (n - center)|| <= radius, T upper triangular.

    Enumerated from the last coordinate down, one vectorised level at a
    time; rows come out in lexicographic order of (n_{g-1}, ..., n_0).
    """
    g = T.shape[0]
    rows = np.zeros((1, 0), dtype=np.int64)
    remaining = np.array([radius * radius])
    for i in range(g - 1, -1, -1):
        tii = T[i, i]
        if rows.shape[1]:
            tail = rows - center[i + 1:]
            shift = (tail @ T[i, i + 1:]) / tii
        else:
            shift = np.zeros(len(rows))
        half = np.sqrt(np.maximum(remaining, 0.0)) / tii
        lo = np.ceil(center[i] - shift - half).astype(np.int64)
        hi = np.floor(center[i] - shift + half).astype(np.int64)
        counts = np.maximum(hi - lo + 1, 0)
        total = int(counts.sum())
        if total == 0:
            return np.zeros((0, g), dtype=np.int64)
        parent = np.repeat(np.arange(len(rows)), counts)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        values = lo[parent] + (np.arange(total) - starts)
        partial = tii * (values - center[i] + shift[parent])
        remaining = remaining[parent] - partial * partial
        rows = np.column_stack([values, rows[parent]])
    return rows


def tail_bound(riemann: RiemannMatrix, radius: float, order: int, y_reduced: np.ndarray) -> float:
    """Bound on the part of the reduced sum (or its order-N derivatives) outside the ellipsoid."""
    g, rho = riemann.g, riemann.rho
    shifted = radius - rho / 2
    if shifted <= 0:
        return np.inf
    a = float(np.linalg.norm(riemann.Y_inv @ y_reduced))
    growth = np.exp(np.pi * float(y_reduced @ riemann.Y_inv @ y_reduced))
    total = 0.0
    for k in range(order + 1):
        s = (g + k) / 2
        total += comb(order, k) * riemann.T_inv_norm ** k * a ** (order - k) * gamma(s) * gammaincc(s, shifted ** 2)
    return float(growth * (2 * np.pi) ** order * (g / 2) * (2 / rho) ** g * total)


def _radius(riemann: RiemannMatrix, order: int, eps: float, y_reduced: np.ndarray, cap: float) -> Tuple[float, float]:
    radius = max((np.sqrt(riemann.g) + riemann.rho) / 2, riemann.rho)
    while True:
        bound = tail_bound(riemann, radius, order, y_reduced)
        if bound < eps:
            return radius, bound
        if radius > cap:
            raise TruncationBudgetExceeded(radius, cap)
        radius += RADIUS_STEP


def _reduce(riemann: RiemannMatrix, z: np.ndarray):
    k = np.rint(riemann.Y_inv @ z.imag).astype(np.int64)
    z1 = z - riemann.tau @ k
    m = np.rint(z1.real).astype(np.int64)
    return z1 - m, k, m


def evaluate(request: ThetaRequest, tau: TauLike, settings: Settings = DEFAULT_SETTINGS) -> ThetaResult:
    riemann = as_riemann_matrix(tau)
    g = riemann.g
    z = request.z
    if z.shape != (g,):
        raise ThetaError(f"z has shape {z.shape}, tau is {g}x{g}")
    delta = request.delta or Characteristic.zero(g)
    d1 = np.array(delta.delta1)
    d2 = np.array(delta.delta2)

    # Step 1: move z into the fundamental cell
    z_red, k, m = _reduce(riemann, z)

    # Step 2: radius from the tail bound
    radius, bound = _radius(riemann, request.order, request.eps, z_red.imag, settings.theta_radius_cap)

    # Step 3: lattice sum over the ellipsoid around the Gaussian centre
    center = -riemann.Y_inv @ z_red.imag - d1
    n = lattice_points(riemann.T, center, radius)
    v = n + d1
    w = z_red + d2
    exponent = 1j * np.pi * np.einsum("ij,jk,ik->i", v, riemann.tau, v) + 2j * np.pi * (v @ w)
    terms = np.exp(exponent)
    value = np.sum(terms)
    grad = hess = None
    if request.order >= 1:
        grad = np.sum((2j * np.pi) * v * terms[:, None], axis=0)
    if request.order == 2:
        hess = (2j * np.pi) ** 2 * np.einsum("ni,nj,n->ij", v, v, terms)

    # Step 4: restore the quasi-periodic factor
    factor = np.exp(2j * np.pi * (d1 @ m)) * np.exp(-1j * np.pi * (k @ riemann.tau @ k) - 2j * np.pi * (k @ (z_red + d2)))
    c = -2j * np.pi * k
    if hess is not None:
        hess = factor * (hess + np.outer(c, grad) + np.outer(grad, c) + np.outer(c, c) * value)
    if grad is not None:
        grad = factor * (grad + c * value)
    value = factor * value

    logger.debug("theta%s: g=%d, order=%d, radius=%.2f, %d points, bound=%.2e",
                 "" if request.delta is None else str(delta), g, request.order, radius, len(n), bound)
    return ThetaResult(
        value=complex(value),
        grad=grad,
        hessian=hess,
        radius=radius,
        bound=bound,
        npoints=len(n),
        shift=(tuple(int(x) for x in m), tuple(int(x) for x in k)),
    )


def theta(z, tau: TauLike, eps: Optional[float] = None, settings: Settings = DEFAULT_SETTINGS) -> complex:
    return theta_char(None, z, tau, eps, settings)


def theta_char(delta: Optional[Characteristic], z, tau: TauLike, eps: Optional[float] = None,
               settings: Settings = DEFAULT_SETTINGS) -> complex:
    request = ThetaRequest(z, 0, eps or settings.theta_eps, delta)
    return evaluate(request, tau, settings).value


def theta_grad(z, tau: TauLike, eps: Optional[float] = None, delta: Optional[Characteristic] = None,
               settings: Settings = DEFAULT_SETTINGS) -> np.ndarray:
    request = ThetaRequest(z, 1, eps or settings.theta_eps, delta)
    return evaluate(request, tau, settings).grad


def theta_hessian(z, tau: TauLike, eps: Optional[float] = None, delta: Optional[Characteristic] = None,
                  settings: Settings = DEFAULT_SETTINGS) -> np.ndarray:
    request = ThetaRequest(z, 2, eps or settings.theta_eps, delta)
    try:
        return evaluate(request, tau, settings).hessian
    except TruncationBudgetExceeded as e:
        raise HessianUnavailable(str(e)) from e


def theta_modulus(z, tau: TauLike, delta: Optional[Characteristic] = None,
                  eps: Optional[float] = None, settings: Settings = DEFAULT_SETTINGS) -> float:
    """|theta(z)| exp(-pi y^T (Im tau)^{-1} y), unchanged by lattice shifts of z."""
    riemann = as_riemann_matrix(tau)
    z_red, _, _ = _reduce(riemann, np.atleast_1d(np.asarray(z, dtype=complex)))
    y = z_red.imag
    value = theta_char(delta, z_red, riemann, eps, settings)
    return float(abs(value) * np.exp(-np.pi * y @ riemann.Y_inv @ y))


def half_period_moduli(z, tau: TauLike, eps: Optional[float] = None,
                       settings: Settings = DEFAULT_SETTINGS) -> np.ndarray:
    """
    Lattice-invariant moduli of theta(z + a/2 + tau b/2) for every a, b in {0, 1}^g.

    Rows are indexed by b and columns by a, with bit i of the index as the
    i-th entry. For a fixed b the 2^g values differ only by the signs
    (-1)^{n.a} of the lattice terms, so one sum grouped by n mod 2 and a
    Hadamard transform give the whole row.
    """
    riemann = as_riemann_matrix(tau)
    g = riemann.g
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (g,):
        raise ThetaError(f"z has shape {z.shape}, tau is {g}x{g}")
    eps = eps or settings.theta_eps
    bits = (np.arange(2 ** g)[:, None] >> np.arange(g)) & 1
    hadamard = 1.0 - 2.0 * ((bits @ bits.T) % 2)
    weights = 1 << np.arange(g)

    moduli = np.zeros((2 ** g, 2 ** g))
    for row, b in enumerate(bits):
        z_red, _, _ = _reduce(riemann, z + riemann.tau @ b / 2)
        y = z_red.imag
        radius, _ = _radius(riemann, 0, eps, y, settings.theta_radius_cap)
        n = lattice_points(riemann.T, -riemann.Y_inv @ y, radius)
        terms = np.exp(1j * np.pi * np.einsum("ij,jk,ik->i", n, riemann.tau, n) + 2j * np.pi * (n @ z_red))
        parity = (n % 2) @ weights
        grouped = (np.bincount(parity, weights=terms.real, minlength=2 ** g)
                   + 1j * np.bincount(parity, weights=terms.imag, minlength=2 ** g))
        moduli[row] = np.abs(hadamard @ grouped) * np.exp(-np.pi * y @ riemann.Y_inv @ y)
    logger.debug("half-period moduli: g=%d, %d shifts", g, 4 ** g)
    return moduli


def half_period_bits(g: int, index: int) -> Tuple[int, ...]:
    return tuple((index >> i) & 1 for i in range(g))

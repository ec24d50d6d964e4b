# wstrata/periods_abel/homology.py

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from wstrata.curve import CyclicCurveSpec, SheetModel, sheet_model
from wstrata.curve.sheets import arg_down
from wstrata.exceptions import RankDeficientHomology

logger = logging.getLogger(__name__)

RAY_EPS = 1e-7


@dataclass(frozen=True)
class Cycle:
    """
    Lift of the edge between consecutive branch points: out on sheet l, back on sheet l + 1.

    `segments` are (start, end, sheet) in the x-plane; both turning points
    are ramification points, which closes the lift.
    """
    edge: int
    sheet: int
    start: int
    end: int
    segments: Tuple[Tuple[complex, complex, int], ...]

    @property
    def closed(self) -> bool:
        return self.segments[0][0] == self.segments[-1][1]

    def __str__(self):
        return f"e{self.edge}^({self.sheet}) - e{self.edge}^({self.sheet + 1})"


@dataclass
class HomologyBasis:
    """
    Harvested cycles, their intersection matrix K and the symplectic transform.

    Row i of `transform` holds the coordinates of alpha_i (i < g) or
    beta_{i-g} (i >= g) over the harvested cycles, so that
    transform K transform^T = [[0, I], [-I, 0]].
    """
    cycles: List[Cycle]
    intersection: np.ndarray
    transform: np.ndarray

    @property
    def genus(self) -> int:
        return len(self.cycles) // 2

    def canonical_form(self) -> np.ndarray:
        return self.transform @ self.intersection @ self.transform.T


def harvest_cycles(model: SheetModel) -> List[Cycle]:
    cycles = []
    order = model.order
    for e in range(len(order) - 1):
        P, Q = order[e], order[e + 1]
        bp, bq = complex(model.b[P]), complex(model.b[Q])
        for l in range(model.r - 1):
            cycles.append(Cycle(edge=e, sheet=l, start=P, end=Q, segments=((bp, bq, l), (bq, bp, l + 1))))
    return cycles


def _ray(model: SheetModel, vertex: int, psi: float, sheet: int) -> float:
    """Angle in the local disc u^r = x - b at a ramified vertex of the edge leaving at angle psi on a sheet."""
    r = model.r
    inverse = pow(int(model.spec.mults[vertex]), -1, r)
    return ((psi + 2 * np.pi * ((inverse * sheet) % r)) / r) % (2 * np.pi)


def _vertex_rays(model: SheetModel, cycle: Cycle) -> dict:
    """{vertex: (in angle, out angle)} for a cycle."""
    XP, XQ = model.X[cycle.start], model.X[cycle.end]
    psi_out = float(arg_down(XQ - XP))
    psi_in = float(arg_down(XP - XQ))
    l = cycle.sheet
    return {
        cycle.start: (_ray(model, cycle.start, psi_out, l + 1), _ray(model, cycle.start, psi_out, l)),
        cycle.end: (_ray(model, cycle.end, psi_in, l), _ray(model, cycle.end, psi_in, l + 1)),
    }


def _in_ccw_sector(angle: float, lo: float, hi: float) -> bool:
    """True when angle lies strictly inside the counter-clockwise sector lo -> hi."""
    span = (hi - lo) % (2 * np.pi)
    offset = (angle - lo) % (2 * np.pi)
    return 0 < offset < span


def intersection_number(model: SheetModel, A: Cycle, B: Cycle) -> int:
    """
    <A, B> from the local pictures at shared ramification points.

    B is pushed off A by turning its rays +eps at its start vertex and -eps
    at its end vertex; at each shared vertex B counts +1 when it passes
    from the right of A to its left and -1 the other way.
    """
    rays_a = _vertex_rays(model, A)
    rays_b = _vertex_rays(model, B)
    total = 0
    for vertex, (a_in, a_out) in rays_a.items():
        if vertex not in rays_b:
            continue
        b_in, b_out = rays_b[vertex]
        shift = RAY_EPS if vertex == B.start else -RAY_EPS
        b_in, b_out = b_in + shift, b_out + shift
        # left of A is the sector swept counter-clockwise from its out ray to its in ray
        in_left = _in_ccw_sector(b_in, a_out, a_in)
        out_left = _in_ccw_sector(b_out, a_out, a_in)
        if out_left and not in_left:
            total += 1
        elif in_left and not out_left:
            total -= 1
    return total


def intersection_matrix(model: SheetModel, cycles: List[Cycle]) -> np.ndarray:
    n = len(cycles)
    K = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            K[i, j] = intersection_number(model, cycles[i], cycles[j])
            K[j, i] = -K[i, j]
    return K


def symplectic_reduction(K: np.ndarray) -> np.ndarray:
    """
    Integer change of basis S with S K S^T = J for a unimodular antisymmetric K.

    Pairs are peeled off one at a time: e is the first remaining vector, a
    Euclid step on <e, w> over the others produces f with <e, f> = 1, and
    every other vector is projected off the pair.
    """
    n = K.shape[0]
    form = lambda u, v: int(u @ K @ v)
    remaining = [np.eye(n, dtype=np.int64)[i] for i in range(n)]
    alphas, betas = [], []
    while remaining:
        e = remaining.pop(0)
        # Step 1: Euclid on the pairings with e
        while True:
            values = [form(e, w) for w in remaining]
            nonzero = [i for i, v in enumerate(values) if v]
            if not nonzero:
                raise RankDeficientHomology("a harvested cycle pairs trivially with the rest")
            pivot = min(nonzero, key=lambda i: (abs(values[i]), i))
            if all(i == pivot or values[i] == 0 for i in nonzero):
                break
            for i in nonzero:
                if i != pivot:
                    remaining[i] = remaining[i] - (values[i] // values[pivot]) * remaining[pivot]
        if abs(values[pivot]) != 1:
            raise RankDeficientHomology(f"pairing gcd {abs(values[pivot])} != 1")
        f = remaining.pop(pivot) * values[pivot]
        # Step 2: project the rest off span(e, f)
        remaining = [v - form(v, f) * e + form(v, e) * f for v in remaining]
        alphas.append(e)
        betas.append(f)
    return np.array(alphas + betas, dtype=np.int64)


def homology_basis(spec: CyclicCurveSpec) -> HomologyBasis:
    model = sheet_model(spec)
    cycles = harvest_cycles(model)
    if len(cycles) != 2 * spec.genus:
        raise RankDeficientHomology(f"harvested {len(cycles)} cycles for genus {spec.genus}")
    K = intersection_matrix(model, cycles)
    det = int(round(np.linalg.det(K.astype(float)))) if len(cycles) else 1
    if abs(det) != 1:
        raise RankDeficientHomology(f"intersection matrix has determinant {det}")
    S = symplectic_reduction(K)
    g = spec.genus
    J = np.block([[np.zeros((g, g)), np.eye(g)], [-np.eye(g), np.zeros((g, g))]]).astype(np.int64)
    if not np.array_equal(S @ K @ S.T, J):
        raise RankDeficientHomology("symplectic reduction did not reach the canonical form")
    if abs(int(round(np.linalg.det(S.astype(float))))) != 1:
        raise RankDeficientHomology("symplectic transform is not unimodular")
    logger.debug("homology for %s: %d cycles, K nonzeros %d", spec.curve_id, len(cycles), int(np.count_nonzero(K)))
    return HomologyBasis(cycles=cycles, intersection=K, transform=S)

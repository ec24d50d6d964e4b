# wstrata/semigroup.py

import logging
from dataclasses import dataclass, field
from functools import reduce
from math import gcd
from typing import Iterable, List, Tuple

from wstrata.exceptions import DegenerateGenusZero, InconsistentSemigroup, InvalidGenerators, NotCofinite

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NumericalSemigroup:
    """
    Cofinite additive submonoid of the non-negative integers.

    Gaps are stored sorted and 0-indexed: gaps[0] is the smallest gap.
    Membership is decided by the gap table, every integer >= conductor
    is a member.
    """
    generators: Tuple[int, ...]
    conductor: int
    gaps: Tuple[int, ...]
    _gapset: frozenset = field(default=frozenset(), repr=False, compare=False)

    @property
    def genus(self) -> int:
        return len(self.gaps)

    @property
    def a_min(self) -> int:
        return self.generators[0]

    def __contains__(self, h: int) -> bool:
        if h < 0:
            return False
        return h >= self.conductor or h not in self._gapset

    def elements(self, bound: int) -> List[int]:
        return [h for h in range(bound + 1) if h in self]

    def frobenius(self) -> int:
        return self.conductor - 1


@dataclass(frozen=True)
class SchubertData:
    alpha: Tuple[int, ...]
    young: Tuple[int, ...]

    def transpose(self) -> Tuple[int, ...]:
        if not self.young:
            return ()
        return tuple(sum(1 for row in self.young if row > j) for j in range(self.young[0]))


@dataclass(frozen=True)
class NormalFormProfile:
    m: int
    m_seq: Tuple[int, ...]
    n: int
    degree_bounds: Tuple[int, ...]


def _membership_table(gens: List[int], limit: int) -> List[bool]:
    table = [False] * (limit + 1)
    table[0] = True
    for h in range(1, limit + 1):
        table[h] = any(h >= a and table[h - a] for a in gens)
    return table


def _minimal_generators(gens: List[int]) -> List[int]:
    kept: List[int] = []
    for a in sorted(set(gens)):
        if kept and _membership_table(kept, a)[a]:
            continue
        kept.append(a)
    return kept


def semigroup_from_generators(gens: Iterable[int]) -> NumericalSemigroup:
    gens = list(gens)
    if not gens or any(int(a) != a or a < 1 for a in gens):
        raise InvalidGenerators(f"generators must be positive integers, got {gens}")
    gens = [int(a) for a in gens]

    divisor = reduce(gcd, gens)
    if divisor != 1:
        raise NotCofinite(gens, divisor)

    # Step 1: prune redundant generators
    minimal = _minimal_generators(gens)
    if minimal[0] == 1:
        return NumericalSemigroup(generators=(1,), conductor=0, gaps=(), _gapset=frozenset())

    # Step 2: membership table up to the Schur bound plus one residue run
    a_min, a_max = minimal[0], minimal[-1]
    limit = (a_min - 1) * (a_max - 1) + a_min
    table = _membership_table(minimal, limit)

    gaps = tuple(h for h in range(limit + 1) if not table[h])
    conductor = gaps[-1] + 1 if gaps else 0

    # Step 3: a_min consecutive members close the table
    if not all(table[conductor:conductor + a_min]):
        raise InvalidGenerators(f"membership table for {minimal} does not close below {limit}")

    logger.debug("semigroup <%s>: genus %d, conductor %d", ",".join(map(str, minimal)), len(gaps), conductor)
    return NumericalSemigroup(
        generators=tuple(minimal),
        conductor=conductor,
        gaps=gaps,
        _gapset=frozenset(gaps),
    )


def schubert_data(H: NumericalSemigroup) -> SchubertData:
    alpha = tuple(ell - i - 1 for i, ell in enumerate(H.gaps))
    young = tuple(a + 1 for a in reversed(alpha))
    return SchubertData(alpha=alpha, young=young)


def is_symmetric(H: NumericalSemigroup) -> bool:
    if H.genus == 0:
        raise DegenerateGenusZero("is_symmetric")

    by_gap = (2 * H.genus - 1) in H.gaps
    data = schubert_data(H)
    by_diagram = data.young == data.transpose()
    if by_gap != by_diagram:
        # both characterisations hold for any semigroup; disagreement means corrupted gaps
        raise InconsistentSemigroup(H.generators, H.gaps)
    return by_gap


def normal_form_profile(H: NumericalSemigroup) -> NormalFormProfile:
    if H.genus == 0:
        raise DegenerateGenusZero("normal_form_profile")

    m = H.a_min
    m_seq = [0] * m
    h = 1
    found = 0
    while found < m:
        if h in H and m_seq[h % m] == 0:
            m_seq[h % m] = h
            found += 1
        h += 1

    n = min(m_seq[j] for j in range(1, m) if gcd(m, j) == 1)
    bounds = tuple(i * n // m for i in range(1, m + 1))
    return NormalFormProfile(m=m, m_seq=tuple(m_seq), n=n, degree_bounds=bounds)


def young_diagram_rows(H: NumericalSemigroup) -> List[str]:
    """Plain-text rendering used by the CLI semigroup table."""
    return ["#" * row for row in schubert_data(H).young]

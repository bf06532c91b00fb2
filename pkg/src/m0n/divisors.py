"""Rational divisor classes supported on the boundary.

Everything here is a finite exact-rational combination of vital boundary
divisors: representatives of the cotangent-line classes, the canonical
class, the Kahler-Einstein pair term, and the effective divisor cut out by
the explicit pluricanonical sections of Kawamata's extension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .combinat import (
    BoundaryPartition,
    WeightVector,
    enumerate_boundary_partitions,
    mu_side_sum,
)
from .errors import BadPairOrder, IndexClash, NonIntegralScaling, TooFewPoints

PairTable = dict[tuple[int, int], Fraction]


@dataclass(frozen=True)
class QDivisor:
    """Exact rational combination of boundary partitions; zeros never stored."""

    n: int
    coefficients: Mapping[BoundaryPartition, Fraction]

    def __post_init__(self) -> None:
        for part, coeff in self.coefficients.items():
            if part.n != self.n:
                raise ValueError(f"partition {part!r} has n={part.n}, divisor has n={self.n}")
            if coeff == 0:
                raise ValueError("zero coefficient stored in a divisor")

    @classmethod
    def of(cls, n: int, items: Iterable[tuple[BoundaryPartition, Fraction | int]]) -> "QDivisor":
        acc: dict[BoundaryPartition, Fraction] = {}
        for part, coeff in items:
            coeff = Fraction(coeff)
            new = acc.get(part, Fraction(0)) + coeff
            if new == 0:
                acc.pop(part, None)
            else:
                acc[part] = new
        return cls(n, acc)

    @classmethod
    def zero(cls, n: int) -> "QDivisor":
        return cls(n, {})

    def coefficient(self, part: BoundaryPartition) -> Fraction:
        return self.coefficients.get(part, Fraction(0))

    def __iter__(self) -> Iterator[tuple[BoundaryPartition, Fraction]]:
        return iter(sorted(self.coefficients.items()))

    def __len__(self) -> int:
        return len(self.coefficients)

    def __add__(self, other: "QDivisor") -> "QDivisor":
        if self.n != other.n:
            raise ValueError(f"mixed n: {self.n} and {other.n}")
        return QDivisor.of(self.n, list(self.coefficients.items()) + list(other.coefficients.items()))

    def __sub__(self, other: "QDivisor") -> "QDivisor":
        return self + other.scale(-1)

    def scale(self, factor: Fraction | int) -> "QDivisor":
        factor = Fraction(factor)
        if factor == 0:
            return QDivisor.zero(self.n)
        return QDivisor(self.n, {p: c * factor for p, c in self.coefficients.items()})

    def __rmul__(self, factor: Fraction | int) -> "QDivisor":
        return self.scale(factor)


def psi_class(i: int, j: int, k: int, n: int) -> QDivisor:
    """Boundary representative of the cotangent-line class at point ``i``.

    The class is linearly equivalent to the sum of all boundary divisors
    whose node separates ``i`` from both ``j`` and ``k``; any choice of the
    reference pair (j, k) gives an equivalent (not equal) divisor.
    """
    if len({i, j, k}) != 3:
        raise IndexClash(f"reference indices must be pairwise distinct, got ({i},{j},{k})")
    for x in (i, j, k):
        if not 1 <= x <= n:
            raise IndexClash(f"index {x} outside 1..{n}")
    full = (1 << n) - 1
    items = []
    for part in enumerate_boundary_partitions(n):
        # block containing i; j and k must both land in the other block
        side = part.mask if part.mask >> (i - 1) & 1 else full ^ part.mask
        if not side >> (j - 1) & 1 and not side >> (k - 1) & 1:
            items.append((part, Fraction(1)))
    return QDivisor.of(n, items)


def canonical_divisor(n: int) -> QDivisor:
    """The canonical class written in the boundary basis.

    Coefficient on a partition with block sizes (a, b) is ((a-2)(b-2)-2)/(n-1).
    """
    if n < 4:
        raise TooFewPoints(f"no boundary divisors for n={n}")
    items = []
    for part in enumerate_boundary_partitions(n):
        a = len(part.side)
        b = n - a
        items.append((part, Fraction((a - 2) * (b - 2) - 2, n - 1)))
    return QDivisor.of(n, items)


def default_reference_pair(s: int, n: int) -> tuple[int, int]:
    """The two smallest indices distinct from ``s``."""
    picks = [x for x in range(1, n + 1) if x != s][:2]
    return picks[0], picks[1]


def _psi_sum(
    n: int,
    weights: Mapping[int, Fraction],
    ref_pairs: Mapping[int, tuple[int, int]] | None,
) -> QDivisor:
    total = QDivisor.zero(n)
    for s, w in weights.items():
        j, k = (ref_pairs or {}).get(s) or default_reference_pair(s, n)
        total = total + psi_class(s, j, k, n).scale(w)
    return total


def psi_minus_2delta(n: int, ref_pairs: Mapping[int, tuple[int, int]] | None = None) -> QDivisor:
    """The representative sum(psi_s) - 2 * (total boundary) of the canonical class.

    Linearly equivalent to :func:`canonical_divisor` but a different
    coefficient vector; intersection numbers against boundary cycles agree.
    """
    psis = _psi_sum(n, {s: Fraction(1) for s in range(1, n + 1)}, ref_pairs)
    delta = QDivisor.of(n, [(p, Fraction(1)) for p in enumerate_boundary_partitions(n)])
    return psis - delta.scale(2)


def d_mu(mu: WeightVector) -> QDivisor:
    """The pair divisor of the singular Kahler-Einstein description.

    Coefficient (|I1|-1)(mu_S - 1) + 1 on each partition, where I1 is the
    light block and mu_S its weight; every coefficient is < 1 away from
    walls (and exactly 1 on them).
    """
    items = []
    for part in enumerate_boundary_partitions(mu.n):
        mu_s, light = mu_side_sum(mu, part)
        lam = (len(light) - 1) * (mu_s - 1) + 1
        items.append((part, lam))
    return QDivisor.of(mu.n, items)


def weighted_divisor(mu: WeightVector) -> QDivisor:
    """Boundary form of the canonical-plus-pair class, before the 1/(n-2) scale.

    Coefficient (|I1|-1)(mu_S - |I1|/(n-1)); coefficientwise equal to
    canonical_divisor(n) + d_mu(mu).
    """
    n = mu.n
    items = []
    for part in enumerate_boundary_partitions(n):
        mu_s, light = mu_side_sum(mu, part)
        b = len(light)
        items.append((part, (b - 1) * (mu_s - Fraction(b, n - 1))))
    return QDivisor.of(n, items)


def chern_divisor(
    mu: WeightVector,
    ref_pairs: Mapping[int, tuple[int, int]] | None = None,
) -> QDivisor:
    """Boundary representative of the metric's Chern class.

    (1/2) ( -sum_s mu_s psi_s + sum_S mu_S D_S ) with each psi expanded
    through a reference pair.  The coefficient vector depends on the pairs,
    its top self-intersection does not.
    """
    n = mu.n
    psis = _psi_sum(n, {s: mu[s] for s in range(1, n + 1)}, ref_pairs)
    boundary = QDivisor.of(
        n, [(p, mu_side_sum(mu, p)[0]) for p in enumerate_boundary_partitions(n)]
    )
    return (boundary - psis).scale(Fraction(1, 2))


def kawamata_lambda(mu: WeightVector, s: int, s2: int) -> Fraction:
    """Multiplicity contributed by the index pair (s, s'), s < s'.

    Zero when the closed run s..s' weighs at most 1 or the open run weighs
    at least 1; otherwise the minimum of mu_s, mu_s', (closed run) - 1 and
    1 - (open run).  The formula reads consecutive runs of indices, so it is
    ordering-sensitive even though the resulting volume is not.
    """
    if not 1 <= s < s2 <= mu.n:
        raise BadPairOrder(f"need 1 <= s < s' <= {mu.n}, got ({s},{s2})")
    closed = sum((mu[k] for k in range(s, s2 + 1)), Fraction(0))
    open_run = closed - mu[s] - mu[s2]
    if closed <= 1 or open_run >= 1:
        return Fraction(0)
    return min(mu[s], mu[s2], closed - 1, 1 - open_run)


def kawamata_lambda_table(mu: WeightVector) -> PairTable:
    """Closed-form table over all pairs 1 <= s < s' <= n (zeros included)."""
    return {
        (s, s2): kawamata_lambda(mu, s, s2)
        for s in range(1, mu.n)
        for s2 in range(s + 1, mu.n + 1)
    }


def kawamata_divisor(mu: WeightVector) -> QDivisor:
    """The effective section divisor: sum over partitions and pairs inside
    the light block of the pair multiplicities.

    Its top self-intersection equals the metric volume.
    """
    n = mu.n
    table = kawamata_lambda_table(mu)
    items = []
    for part in enumerate_boundary_partitions(n):
        _, light = mu_side_sum(mu, part)
        coeff = Fraction(0)
        inside = list(light)
        for a in range(len(inside)):
            for b in range(a + 1, len(inside)):
                coeff += table[(inside[a], inside[b])]
        if coeff:
            items.append((part, coeff))
    return QDivisor.of(n, items)


def minimal_scaling(mu: WeightVector) -> int:
    """Least d >= 1 with d*mu integral (lcm of the weight denominators)."""
    return math.lcm(*(w.denominator for w in mu.weights))


def kawamata_lambda_via_counts(mu: WeightVector, d: int) -> PairTable:
    """Independent pair-multiplicity table built by explicit counting.

    Lay out 2d slots where each index s occupies d*mu_s consecutive slots
    (total 2d); read the pair at slots (i, d+i) for i = 1..d and count how
    often each (s, s') occurs, divided by d.  Agrees with the closed form
    entrywise.
    """
    if d < 1:
        raise NonIntegralScaling(f"scaling must be a positive integer, got {d}")
    counts_per_index = []
    for s in range(1, mu.n + 1):
        ds = d * mu[s]
        if ds.denominator != 1:
            raise NonIntegralScaling(f"d={d} does not clear weight {s} = {mu[s]}")
        counts_per_index.append(int(ds))
    slot_owner = []
    for s, reps in enumerate(counts_per_index, start=1):
        slot_owner.extend([s] * reps)
    assert len(slot_owner) == 2 * d
    table: PairTable = {
        (s, s2): Fraction(0) for s in range(1, mu.n) for s2 in range(s + 1, mu.n + 1)
    }
    for i in range(d):
        j, j2 = slot_owner[i], slot_owner[d + i]
        if j == j2:
            raise AssertionError(
                f"slot {i + 1} and slot {d + i + 1} fell in the same index block {j}; "
                "this cannot happen for weights < 1"
            )
        table[(j, j2)] += Fraction(1, d)
    return table

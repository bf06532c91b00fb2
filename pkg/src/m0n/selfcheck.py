"""Recompute every published intersection table and diff against the engine.

The five- and six-point tables are classical: products of vital divisors
depend only on the nesting pattern of the partitions, so each product has a
closed expected value.  The six-point symmetric grouping block exercises
rational combinations.  A fresh engine must reproduce every number exactly;
any diff is a bug, and the checker reports it rather than asserting.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterable

from .combinat import BoundaryPartition, enumerate_boundary_partitions
from .divisors import QDivisor
from .intersect import MemoStore, product_number, qdivisor_product


def keel_compatible(p: BoundaryPartition, q: BoundaryPartition) -> bool:
    """Whether the two vital divisors can meet: some block of one nests in
    a block of the other."""
    full = (1 << p.n) - 1
    sides_p = (p.mask, full ^ p.mask)
    sides_q = (q.mask, full ^ q.mask)
    return any(i & ~j == 0 for i in sides_p for j in sides_q)


def _pair_block(p: BoundaryPartition) -> int:
    """The smaller block's mask (the 2-element block for (2,3) and (2,4) types)."""
    other = ((1 << p.n) - 1) ^ p.mask
    return p.mask if p.mask.bit_count() <= other.bit_count() else other


def m05_expected(a: BoundaryPartition, b: BoundaryPartition) -> int:
    """Published five-point rule: -1 on equal pairs, 0 on overlapping pairs,
    +1 on disjoint pairs."""
    pa, pb = _pair_block(a), _pair_block(b)
    if pa == pb:
        return -1
    return 0 if pa & pb else 1


def m06_expected(a: BoundaryPartition, b: BoundaryPartition, c: BoundaryPartition) -> int:
    """Published six-point rule for triple products of vital divisors.

    Zero whenever two factors fail the nesting test; otherwise the value
    depends only on the multiset shape (pair-type blocks have 2 elements,
    triple-type blocks 3).
    """
    trip = (a, b, c)
    if not (keel_compatible(a, b) and keel_compatible(a, c) and keel_compatible(b, c)):
        return 0

    def pair_type(p: BoundaryPartition) -> bool:
        return _pair_block(p).bit_count() == 2

    counts = Counter(trip)
    if len(counts) == 1:
        return 1 if pair_type(a) else 2
    if len(counts) == 2:
        # with one factor doubled, the value depends only on the unrepeated
        # one: -1 when it is pair-type, 0 when triple-type
        single = next(p for p, k in counts.items() if k == 1)
        return -1 if pair_type(single) else 0
    return 1


def grouping_divisors_n6() -> dict[str, QDivisor]:
    """The symmetric six-point groupings: the heavy triple, the mixed
    triples, and the two pair families."""
    n = 6
    heavy = QDivisor.of(n, [(BoundaryPartition.of([1, 2, 3], n), 1)])
    mixed = QDivisor.of(
        n,
        [
            (BoundaryPartition.of([i, j, k], n), 1)
            for i in (1, 2, 3)
            for j in (4, 5, 6)
            for k in (4, 5, 6)
            if j < k
        ],
    )
    heavy_pairs = QDivisor.of(
        n, [(BoundaryPartition.of([i, j], n), 1) for i in (1, 2, 3) for j in (1, 2, 3) if i < j]
    )
    light_pairs = QDivisor.of(
        n, [(BoundaryPartition.of([i, j], n), 1) for i in (4, 5, 6) for j in (4, 5, 6) if i < j]
    )
    return {"A1": heavy, "A2": mixed, "B": heavy_pairs, "C": light_pairs}


GROUPING_EXPECTED: dict[str, int] = {
    "A1.A1.A1": 2,
    "A1.A1.A2": 0,
    "A1.A1.B": -3,
    "A1.A1.C": -3,
    "A1.A2.A2": 0,
    "A1.A2.B": 0,
    "A1.A2.C": 0,
    "A1.B.B": 0,
    "A1.B.C": 9,
    "A1.C.C": 0,
    "A2.A2.A2": 18,
    "A2.A2.B": -9,
    "A2.A2.C": -9,
    "A2.B.B": 0,
    "A2.B.C": 9,
    "A2.C.C": 0,
    "B.B.B": 3,
    "B.B.C": -9,
    "B.C.C": -9,
    "C.C.C": 3,
    "(3A1+A2+3B+C)^3": 48,
}


@dataclass(frozen=True)
class CheckRow:
    section: str
    label: str
    got: Fraction
    want: Fraction

    @property
    def ok(self) -> bool:
        return self.got == self.want


@dataclass(frozen=True)
class SelfCheckResult:
    rows: tuple[CheckRow, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def failures(self) -> list[CheckRow]:
        return [r for r in self.rows if not r.ok]

    def section_counts(self) -> dict[str, tuple[int, int]]:
        out: dict[str, tuple[int, int]] = {}
        for row in self.rows:
            good, total = out.get(row.section, (0, 0))
            out[row.section] = (good + row.ok, total + 1)
        return out


def run_selfcheck(memo: MemoStore | None | bool = True) -> SelfCheckResult:
    """Diff the engine against every published table; deterministic output."""
    rows: list[CheckRow] = []

    parts5 = enumerate_boundary_partitions(5)
    for a, b in combinations_with_replacement(parts5, 2):
        got = product_number([a, b], 5, memo)
        rows.append(
            CheckRow("n5-pairs", f"{a.literal()};{b.literal()}", got, Fraction(m05_expected(a, b)))
        )

    parts6 = enumerate_boundary_partitions(6)
    for a, b, c in combinations_with_replacement(parts6, 3):
        got = product_number([a, b, c], 6, memo)
        rows.append(
            CheckRow(
                "n6-triples",
                f"{a.literal()};{b.literal()};{c.literal()}",
                got,
                Fraction(m06_expected(a, b, c)),
            )
        )

    groups = grouping_divisors_n6()
    for x, y, z in combinations_with_replacement(sorted(groups), 3):
        got = qdivisor_product([groups[x], groups[y], groups[z]], memo)
        rows.append(CheckRow("n6-groupings", f"{x}.{y}.{z}", got, Fraction(GROUPING_EXPECTED[f"{x}.{y}.{z}"])))
    combined = (
        groups["A1"].scale(3) + groups["A2"] + groups["B"].scale(3) + groups["C"]
    )
    got = qdivisor_product([combined] * 3, memo)
    rows.append(CheckRow("n6-groupings", "(3A1+A2+3B+C)^3", got, Fraction(48)))

    return SelfCheckResult(tuple(rows))


def iter_multisets(n: int) -> Iterable[tuple[BoundaryPartition, ...]]:
    """All unordered (n-3)-fold choices of vital divisors at n points."""
    return combinations_with_replacement(enumerate_boundary_partitions(n), n - 3)

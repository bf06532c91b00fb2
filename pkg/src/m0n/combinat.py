"""Marked-point sets, boundary partitions, and weight vectors.

Indices of marked points run from 1 to n.  Subsets of ``{1..n}`` are stored
as bitmasks (bit ``i-1`` encodes membership of index ``i``), which keeps all
set algebra exact and cheap.  ``n`` is capped at 16 so every mask fits in a
machine word; the cap is validated, never silent.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import (
    AdmissibilityError,
    AdmissibilityWarning,
    TooFewPoints,
    UnsupportedN,
    WeightOutOfRange,
    WeightSumNotTwo,
)

MAX_POINTS = 16


def _check_n(n: int) -> None:
    if n < 4:
        raise TooFewPoints(f"need at least 4 marked points, got n={n}")
    if n > MAX_POINTS:
        raise UnsupportedN(f"n={n} exceeds the supported cap of {MAX_POINTS}")


def mask_of(indices: Iterable[int], n: int) -> int:
    """Bitmask of a subset of {1..n}; rejects out-of-range indices."""
    mask = 0
    for i in indices:
        if not 1 <= i <= n:
            raise ValueError(f"marked-point index {i} outside 1..{n}")
        mask |= 1 << (i - 1)
    return mask


def indices_of(mask: int) -> tuple[int, ...]:
    """Ascending marked-point indices encoded by a bitmask."""
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True, order=True)
class MarkedSet:
    """An exact subset of the marked points {1..n}.

    Immutable value type; union/intersection/complement are plain bitmask
    operations, so equality and hashing are structural.
    """

    n: int
    mask: int

    def __post_init__(self) -> None:
        _check_n(self.n)
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError(f"mask {self.mask:#x} not a subset of {{1..{self.n}}}")

    @classmethod
    def of(cls, indices: Iterable[int], n: int) -> "MarkedSet":
        return cls(n, mask_of(indices, n))

    def __contains__(self, index: int) -> bool:
        return 1 <= index <= self.n and bool(self.mask >> (index - 1) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(indices_of(self.mask))

    def __len__(self) -> int:
        return self.mask.bit_count()

    def union(self, other: "MarkedSet") -> "MarkedSet":
        self._check_same_n(other)
        return MarkedSet(self.n, self.mask | other.mask)

    def intersection(self, other: "MarkedSet") -> "MarkedSet":
        self._check_same_n(other)
        return MarkedSet(self.n, self.mask & other.mask)

    def complement(self) -> "MarkedSet":
        return MarkedSet(self.n, ((1 << self.n) - 1) ^ self.mask)

    def issubset(self, other: "MarkedSet") -> bool:
        self._check_same_n(other)
        return self.mask & ~other.mask == 0

    def _check_same_n(self, other: "MarkedSet") -> None:
        if self.n != other.n:
            raise ValueError(f"mixed ambient sizes n={self.n} and n={other.n}")

    def __repr__(self) -> str:
        return "{" + ",".join(str(i) for i in self) + "}"


@dataclass(frozen=True, order=True)
class BoundaryPartition:
    """Unordered 2-block partition {I, I^c} of {1..n} with both blocks of size >= 2.

    Each such partition labels one vital boundary divisor.  The stored block
    is the one *not* containing index n, which makes the representation of
    the unordered pair unique.  Ordering (for deterministic enumeration and
    canonical product keys) is by block size, then by ascending indices.
    """

    n: int
    _sort_key: tuple[int, ...]  # (|side|, *indices); derived, kept first for order=True
    mask: int

    def __init__(self, n: int, mask: int):
        _check_n(n)
        full = (1 << n) - 1
        if mask & ~full:
            raise ValueError(f"mask {mask:#x} not a subset of {{1..{n}}}")
        if mask >> (n - 1) & 1:
            mask ^= full  # canonical block avoids index n
        size = mask.bit_count()
        if size < 2 or n - size < 2:
            raise ValueError(
                f"both blocks must have size >= 2, got sizes {size} and {n - size}"
            )
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "_sort_key", (size,) + indices_of(mask))

    @classmethod
    def of(cls, side: Iterable[int], n: int) -> "BoundaryPartition":
        return cls(n, mask_of(side, n))

    @classmethod
    def parse(cls, text: str, n: int) -> "BoundaryPartition":
        """Parse a comma-separated list of indices of either block."""
        try:
            indices = [int(tok) for tok in text.strip().split(",") if tok.strip()]
        except ValueError as exc:
            raise ValueError(f"bad partition literal {text!r}") from exc
        if not indices:
            raise ValueError("empty partition literal")
        return cls(n, mask_of(indices, n))

    @property
    def side(self) -> MarkedSet:
        """The canonical block (the one not containing index n)."""
        return MarkedSet(self.n, self.mask)

    @property
    def other_side(self) -> MarkedSet:
        return self.side.complement()

    def literal(self) -> str:
        """Canonical text form: ascending indices of the canonical block."""
        return ",".join(str(i) for i in indices_of(self.mask))

    def __repr__(self) -> str:
        other = ",".join(str(i) for i in self.other_side)
        return f"D[{self.literal()}|{other}]"


@dataclass(frozen=True)
class WeightVector:
    """n rational weights, each in (0,1), summing to exactly 2."""

    weights: tuple[Fraction, ...]

    @property
    def n(self) -> int:
        return len(self.weights)

    def __getitem__(self, index: int) -> Fraction:
        """Weight of marked point ``index`` (1-based)."""
        if not 1 <= index <= self.n:
            raise IndexError(f"marked-point index {index} outside 1..{self.n}")
        return self.weights[index - 1]

    def subset_sum(self, subset: MarkedSet) -> Fraction:
        return sum((self.weights[i - 1] for i in subset), Fraction(0))

    def permuted(self, perm: Sequence[int]) -> "WeightVector":
        """Reindexed copy: new weight at position i is the old one at perm[i]."""
        if sorted(perm) != list(range(1, self.n + 1)):
            raise ValueError("perm must be a permutation of 1..n")
        return WeightVector(tuple(self.weights[p - 1] for p in perm))


def make_weight_vector(
    n: int,
    weights: Sequence[Fraction | int | str],
    strict: bool = False,
) -> WeightVector:
    """Validate weights and build a :class:`WeightVector`.

    Subset sums equal to 1 ("walls") make the associated metric completion
    degenerate; they are reported via :class:`AdmissibilityWarning`, or raise
    :class:`AdmissibilityError` when ``strict`` is set.
    """
    if n < 4:
        raise TooFewPoints(f"need at least 4 marked points, got n={n}")
    if n > MAX_POINTS:
        raise UnsupportedN(f"n={n} exceeds the supported cap of {MAX_POINTS}")
    if len(weights) != n:
        raise ValueError(f"expected {n} weights, got {len(weights)}")
    ws = tuple(Fraction(w) for w in weights)
    for i, w in enumerate(ws, start=1):
        if not 0 < w < 1:
            raise WeightOutOfRange(f"weight {i} is {w}, not in the open interval (0,1)")
    total = sum(ws)
    if total != 2:
        raise WeightSumNotTwo(f"weights sum to {total}, expected exactly 2")
    mu = WeightVector(ws)
    walls = check_admissibility(mu)
    if walls:
        described = ", ".join(repr(w) for w in walls)
        if strict:
            raise AdmissibilityError(f"subset sums equal to 1: {described}")
        warnings.warn(
            f"weights admit subset sums equal to 1: {described}",
            AdmissibilityWarning,
            stacklevel=2,
        )
    return mu


def enumerate_boundary_partitions(n: int) -> list[BoundaryPartition]:
    """All 2^(n-1) - n - 1 boundary partitions, deterministically ordered."""
    _check_n(n)
    out = []
    for mask in range(1 << (n - 1)):  # blocks avoiding index n
        size = mask.bit_count()
        if 2 <= size <= n - 2:
            out.append(BoundaryPartition(n, mask))
    out.sort()
    return out


def mu_side_sum(mu: WeightVector, part: BoundaryPartition) -> tuple[Fraction, MarkedSet]:
    """The smaller of the two block weight sums and the block realizing it.

    The two sums add to 2.  On a wall (both sums equal to 1) the canonical
    stored block is designated as the light one.
    """
    if mu.n != part.n:
        raise ValueError(f"weight vector has n={mu.n}, partition has n={part.n}")
    side = part.side
    s = mu.subset_sum(side)
    if s <= 1:
        return s, side
    return 2 - s, part.other_side


def check_admissibility(mu: WeightVector) -> list[MarkedSet]:
    """All subsets whose weights sum to exactly 1, one per complementary pair.

    The reported representative never contains index n.  An empty list means
    the weights are admissible.
    """
    n = mu.n
    sums: list[Fraction] = [Fraction(0)] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + mu.weights[low.bit_length() - 1]
    walls = [
        MarkedSet(n, mask)
        for mask in range(1, 1 << (n - 1))  # representative avoids index n
        if sums[mask] == 1
    ]
    walls.sort()
    return walls


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or integer "p" (no whitespace) into an exact rational."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational literal {text!r}") from exc


def format_rational(value: Fraction) -> str:
    """Exact text form, "p/q" or "p"; parses back to an equal value."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_weights(text: str) -> list[Fraction]:
    """Parse a comma-separated list of rational literals."""
    items = [tok for tok in text.split(",") if tok.strip()]
    if not items:
        raise ValueError("empty weight list")
    return [parse_rational(tok.strip()) for tok in items]

"""Complex hyperbolic volumes by five independent exact formulas.

For weights mu (n positive rationals in (0,1) summing to 2) the volume of
the associated cone metric on the n-pointed genus-zero moduli space can be
computed as

* ``volume_ke``        -- top power of (canonical class + pair divisor),
  divided by (n-2)^(n-3);
* ``volume_weighted``  -- the same class pre-combined into one boundary
  coefficient vector;
* ``volume_psi``       -- top power of the Chern representative built from
  cotangent-line classes;
* ``volume_kawamata``  -- top power of the effective section divisor;
* ``volume_mcmullen``  -- McMullen's Gauss-Bonnet partition sum, with no
  intersection theory at all.

All five agree exactly for every admissible mu; :func:`cross_check` runs
whichever apply and reports the comparison.  Closed forms for n=5 and for
the symmetric six-point family serve as additional fixtures.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Mapping

from .combinat import (
    MarkedSet,
    WeightVector,
    check_admissibility,
    format_rational,
)
from .divisors import (
    canonical_divisor,
    chern_divisor,
    d_mu,
    kawamata_divisor,
    weighted_divisor,
)
from .errors import BetaOutOfRange, UnsupportedN, WrongN
from .intersect import MemoStore, qdivisor_power

ENGINE_MAX_N = 9  # intersection-engine formulas
MCMULLEN_MAX_N = 12  # Bell(12) ~ 4.2e6 partitions


def _check_engine_n(n: int) -> None:
    if n > ENGINE_MAX_N:
        raise UnsupportedN(
            f"intersection-engine volume formulas are capped at n={ENGINE_MAX_N}, got {n}"
        )


def volume_ke(mu: WeightVector, memo: MemoStore | None | bool = True) -> Fraction:
    """(canonical + pair divisor)^(n-3) / (n-2)^(n-3)."""
    _check_engine_n(mu.n)
    n = mu.n
    div = canonical_divisor(n) + d_mu(mu)
    return qdivisor_power(div, n, memo) / Fraction(n - 2) ** (n - 3)


def volume_weighted(mu: WeightVector, memo: MemoStore | None | bool = True) -> Fraction:
    """Top power of the combined boundary coefficient vector over (n-2)."""
    _check_engine_n(mu.n)
    n = mu.n
    return qdivisor_power(weighted_divisor(mu).scale(Fraction(1, n - 2)), n, memo)


def volume_psi(
    mu: WeightVector,
    memo: MemoStore | None | bool = True,
    ref_pairs: Mapping[int, tuple[int, int]] | None = None,
) -> Fraction:
    """Top power of the Chern representative; independent of the psi
    reference pairs."""
    _check_engine_n(mu.n)
    return qdivisor_power(chern_divisor(mu, ref_pairs), mu.n, memo)


def volume_kawamata(mu: WeightVector, memo: MemoStore | None | bool = True) -> Fraction:
    """Top power of the effective section divisor."""
    _check_engine_n(mu.n)
    return qdivisor_power(kawamata_divisor(mu), mu.n, memo)


def _partition_factors(mu: WeightVector) -> Iterator[tuple[int, Fraction]]:
    """(block count, product of max(0, 1-weight)^{size-1}) over set partitions.

    Recursive block assignment with pruning: once a block of size >= 2
    weighs >= 1 its factor is 0 and stays 0, so the whole subtree of
    refinements is skipped.  Partitions with fewer than 3 blocks never
    contribute (some block then weighs >= 1 with >= 2 elements) and are
    dropped by the caller via the block count.
    """
    n = mu.n
    weights = mu.weights

    # blocks: list of (size, weight sum); factors applied once blocks close
    def recurse(i: int, blocks: list[tuple[int, Fraction]]) -> Iterator[tuple[int, Fraction]]:
        if i == n:
            prod = Fraction(1)
            for size, wsum in blocks:
                base = max(Fraction(0), 1 - wsum)
                if size > 1:
                    if base == 0:
                        return
                    prod *= base ** (size - 1)
            yield len(blocks), prod
            return
        w = weights[i]
        for b in range(len(blocks)):
            size, wsum = blocks[b]
            if size >= 2 and wsum >= 1:
                continue  # factor already pinned at 0
            new_size, new_sum = size + 1, wsum + w
            if new_size >= 2 and new_sum >= 1:
                # this block's factor will be 0 unless it merely closes at
                # exactly weight 1 with more elements -- still 0; prune
                continue
            blocks[b] = (new_size, new_sum)
            yield from recurse(i + 1, blocks)
            blocks[b] = (size, wsum)
        blocks.append((1, w))
        yield from recurse(i + 1, blocks)
        blocks.pop()

    return recurse(0, [])


def volume_mcmullen(mu: WeightVector) -> Fraction:
    """Gauss-Bonnet partition sum: an engine-free volume formula.

    ((-1)^N / (N+1)) * sum over set partitions Q of {1..n} with |Q| >= 3 of
    (-1)^{|Q|+1} (|Q|-3)! * prod_{B in Q} max(0, 1 - weight(B))^{|B|-1},
    with x^0 = 1.  Partitions with |Q| <= 2 would need (|Q|-3)! but their
    product factor always vanishes, so they are omitted.
    """
    n = mu.n
    if n > MCMULLEN_MAX_N:
        raise UnsupportedN(
            f"partition-sum volume is capped at n={MCMULLEN_MAX_N}, got {n}"
        )
    big_n = n - 3
    total = Fraction(0)
    fact = [1] * (n + 1)
    for k in range(2, n + 1):
        fact[k] = fact[k - 1] * k
    for blocks, prod in _partition_factors(mu):
        if blocks < 3 or prod == 0:
            continue
        sign = -1 if blocks % 2 == 0 else 1  # (-1)^{|Q|+1}
        total += sign * fact[blocks - 3] * prod
    return Fraction((-1) ** big_n, big_n + 1) * total


def volume_n5_closed_form(mu: WeightVector) -> Fraction:
    """Exact five-point volume by the closed case analysis.

    Weights are sorted descending internally; the six cases split on which
    consecutive pair sums pass 1.
    """
    if mu.n != 5:
        raise WrongN(f"closed form defined only for n=5, got n={mu.n}")
    m = sorted(mu.weights, reverse=True)
    m1, m2, m3, m4, m5 = m
    if m2 + m3 >= 1:
        # then m1+m4 <= 1 is automatic
        return 2 * m4 * m5
    if m1 + m5 >= 1:
        return (1 - m1) ** 2
    if m1 + m4 >= 1:
        return (1 - m1) ** 2 - (1 - m1 - m5) ** 2
    if m1 + m3 >= 1:
        return (1 - m1) ** 2 - (1 - m1 - m4) ** 2 - (1 - m1 - m5) ** 2
    if m1 + m2 >= 1:
        return 2 * m3 * m5 - (1 - m1 - m4) ** 2 - (1 - m2 - m4) ** 2
    # all pair sums below 1: cyclic form, indices mod 5
    gaps = [1 - m[i] - m[(i + 1) % 5] for i in range(5)]
    return 2 * sum(gaps[i - 1] * gaps[i] for i in range(5)) - sum(g * g for g in gaps)


def volume_n6_symmetric_closed_form(beta: Fraction) -> Fraction:
    """Exact volume for six weights (a, a, a, b, b, b) with b = beta <= a.

    The weight sum forces a + b = 2/3; the closed form is
    6 b^3 - 3 max(2b - 1/3, 0)^3 on 0 < b <= 1/3.
    """
    beta = Fraction(beta)
    if not 0 < beta <= Fraction(1, 3):
        raise BetaOutOfRange(f"beta must lie in (0, 1/3], got {beta}")
    bump = max(Fraction(0), 2 * beta - Fraction(1, 3))
    return 6 * beta**3 - 3 * bump**3


def symmetric_n6_beta(mu: WeightVector) -> Fraction | None:
    """The smaller weight value if mu is a permutation of (a,a,a,b,b,b)."""
    if mu.n != 6:
        return None
    m = sorted(mu.weights, reverse=True)
    if m[0] == m[1] == m[2] and m[3] == m[4] == m[5]:
        return m[5]
    return None


@dataclass(frozen=True)
class VolumeReport:
    """Exact results of all applicable volume formulas for one weight vector."""

    n: int
    weights: tuple[Fraction, ...]
    results: dict[str, Fraction]
    walls: list[MarkedSet]
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        values = set(self.results.values())
        return len(values) == 1

    @property
    def value(self) -> Fraction:
        if not self.agree:
            raise ValueError(f"formulas disagree: {self.results}")
        return next(iter(self.results.values()))

    def to_json(self) -> dict:
        # timings stay off the wire: JSON output carries no floats
        return {
            "n": self.n,
            "weights": [format_rational(w) for w in self.weights],
            "results": {k: format_rational(v) for k, v in sorted(self.results.items())},
            "agree": self.agree,
            "walls": [sorted(w) for w in self.walls],
        }


def cross_check(
    mu: WeightVector,
    memo: MemoStore | None | bool = True,
    formulas: list[str] | None = None,
) -> VolumeReport:
    """Run every applicable volume formula and compare the exact results.

    A disagreement is always a software bug, never a data issue; the report
    keeps all per-formula values so the mismatch is visible.
    """
    n = mu.n
    available: dict[str, Callable[[], Fraction]] = {}
    if n <= ENGINE_MAX_N:
        available["ke"] = lambda: volume_ke(mu, memo)
        available["weighted"] = lambda: volume_weighted(mu, memo)
        available["psi"] = lambda: volume_psi(mu, memo)
        available["kawamata"] = lambda: volume_kawamata(mu, memo)
    if n <= MCMULLEN_MAX_N:
        available["mcmullen"] = lambda: volume_mcmullen(mu)
    if n == 5:
        available["closed_n5"] = lambda: volume_n5_closed_form(mu)
    beta = symmetric_n6_beta(mu)
    if beta is not None:
        available["closed_n6_symmetric"] = lambda: volume_n6_symmetric_closed_form(beta)
    if formulas is not None:
        unknown = sorted(set(formulas) - set(available))
        if unknown:
            raise UnsupportedN(
                f"formulas {unknown} not applicable at n={n}; "
                f"available: {sorted(available)}"
            )
        available = {k: v for k, v in available.items() if k in formulas}
    if not available:
        raise UnsupportedN(f"no volume formula applies at n={n}")
    results: dict[str, Fraction] = {}
    timings: dict[str, float] = {}
    for name, fn in available.items():
        start = time.perf_counter()
        results[name] = fn()
        timings[name] = time.perf_counter() - start
    return VolumeReport(
        n=n,
        weights=mu.weights,
        results=results,
        walls=check_admissibility(mu),
        timings=timings,
    )

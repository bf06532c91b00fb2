from __future__ import annotations

import random
from fractions import Fraction

from m0n import WeightVector, check_admissibility


def frac(text) -> Fraction:
    return Fraction(text)


def mu_of(*weights) -> WeightVector:
    """Weight vector from literals; bypasses the wall warning of the
    validating constructor (tests opt in to walls deliberately)."""
    ws = tuple(Fraction(w) for w in weights)
    assert all(0 < w < 1 for w in ws) and sum(ws) == 2
    return WeightVector(ws)


def random_admissible_weights(n: int, rng: random.Random, max_den: int = 48) -> WeightVector:
    """Random rational weights in (0,1) summing to 2 with no subset wall."""
    while True:
        den = rng.randint(n + 1, max_den)
        cuts = sorted(rng.sample(range(1, 2 * den), n - 1))
        parts = [b - a for a, b in zip((0, *cuts), (*cuts, 2 * den))]
        if any(p >= den for p in parts):
            continue
        mu = WeightVector(tuple(Fraction(p, den) for p in parts))
        if check_admissibility(mu):
            continue
        return mu

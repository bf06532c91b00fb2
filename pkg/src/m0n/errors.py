"""Exception and warning types shared across the package."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class TooFewPoints(EngineError):
    """Fewer than 4 marked points: no boundary divisors exist."""


class UnsupportedN(EngineError):
    """The requested number of marked points exceeds a hard cap."""


class WeightOutOfRange(EngineError):
    """Some weight lies outside the open interval (0, 1)."""


class WeightSumNotTwo(EngineError):
    """Weights do not sum to exactly 2."""


class AdmissibilityError(EngineError):
    """Some subset of the weights sums to exactly 1 (strict mode only)."""


class InvalidTree(EngineError):
    """Vertex-labelled tree violates a structural or stability invariant."""


class MixedCodimension(EngineError):
    """Formal cycle arithmetic attempted across different codimensions."""


class CodimensionOverflow(EngineError):
    """Intersection would push a cycle past the top codimension n-3."""


class WrongArity(EngineError):
    """A top product needs exactly n-3 divisor factors."""


class PairContainsE(EngineError):
    """The chosen flag pair for an edge split contains the split edge."""


class IndexClash(EngineError):
    """Marked-point indices expected to be pairwise distinct are not."""


class BadPairOrder(EngineError):
    """An index pair (s, s') must satisfy s < s'."""


class NonIntegralScaling(EngineError):
    """The scaling d does not clear all weight denominators."""


class WrongN(EngineError):
    """Operation defined only for a specific number of marked points."""


class BetaOutOfRange(EngineError):
    """Symmetric six-point weight parameter must lie in (0, 1/3]."""


class MemoConflict(EngineError):
    """A memo entry was rewritten with a different value (internal bug)."""


class CacheFormatError(EngineError):
    """A persisted cache file is malformed or has the wrong version."""


class AdmissibilityWarning(UserWarning):
    """Non-fatal notice that some subset of weights sums to exactly 1."""

"""Vertex-labelled stable trees and formal rational sums of them.

A boundary stratum of the compactified genus-zero moduli space is encoded by
a tree whose vertices carry pairwise disjoint subsets of {1..n} covering all
of it, subject to stability: ``|label| + degree >= 3`` at every vertex.  The
number of edges is the codimension of the stratum.

Trees are compared up to label-preserving isomorphism through a canonical
key: root at the vertex owning marked index 1 (labels partition {1..n}, so
the root is well defined), then encode bottom-up with children sorted by
their encodings, AHU style, embedding each vertex label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .combinat import BoundaryPartition, _check_n, indices_of, mask_of
from .errors import InvalidTree, MixedCodimension, TooFewPoints

CanonicalTreeKey = str


@dataclass(frozen=True)
class StableTree:
    """A stable tree: vertex labels as bitmasks plus edges on vertex slots.

    Construction validates every invariant (disjoint labels covering {1..n},
    connectedness, acyclicity, stability), so any held instance is valid.
    Edges are normalized to sorted pairs in sorted order; note that equality
    is therefore by *presentation*, not isomorphism; use :func:`canonical_key`
    to compare shapes.
    """

    n: int
    labels: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def __init__(self, n: int, labels: Iterable[int], edges: Iterable[tuple[int, int]]):
        _check_n(n)
        labels = tuple(labels)
        edges = tuple(sorted((min(a, b), max(a, b)) for a, b in edges))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "edges", edges)
        problems = _violations(n, labels, edges)
        if problems:
            raise InvalidTree("; ".join(problems))

    @classmethod
    def of(cls, n: int, labels: Iterable[Iterable[int]], edges: Iterable[tuple[int, int]]) -> "StableTree":
        """Build from labels given as index collections instead of bitmasks."""
        return cls(n, (mask_of(lab, n) for lab in labels), edges)

    @property
    def codim(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return sum(1 for a, b in self.edges if v in (a, b))

    def neighbors(self, v: int) -> list[int]:
        return [b if a == v else a for a, b in self.edges if v in (a, b)]

    def label_indices(self, v: int) -> tuple[int, ...]:
        return indices_of(self.labels[v])

    def to_json(self) -> dict:
        return {
            "labels": [list(self.label_indices(v)) for v in range(len(self.labels))],
            "edges": [list(e) for e in self.edges],
        }

    @classmethod
    def from_json(cls, n: int, data: Mapping) -> "StableTree":
        return cls.of(n, data["labels"], [tuple(e) for e in data["edges"]])

    def __repr__(self) -> str:
        labs = "|".join("{" + ",".join(map(str, self.label_indices(v))) + "}"
                        for v in range(len(self.labels)))
        return f"StableTree({labs}; edges={list(self.edges)})"


def _violations(n: int, labels: tuple[int, ...], edges: tuple[tuple[int, int], ...]) -> list[str]:
    out = []
    k = len(labels)
    if k == 0:
        return ["tree has no vertices"]
    full = (1 << n) - 1
    seen = 0
    for v, lab in enumerate(labels):
        if lab & ~full:
            out.append(f"vertex {v} label not a subset of {{1..{n}}}")
        if lab & seen:
            out.append(f"vertex {v} label overlaps an earlier one")
        seen |= lab
    if seen != full:
        out.append("labels do not cover {1..n}")
    deg = [0] * k
    for a, b in edges:
        if not (0 <= a < k and 0 <= b < k):
            return out + [f"edge ({a},{b}) references a missing vertex"]
        if a == b:
            return out + [f"self-loop at vertex {a}"]
        deg[a] += 1
        deg[b] += 1
    if len(edges) != k - 1:
        out.append(f"{len(edges)} edges on {k} vertices cannot form a tree")
    else:
        # connectivity; acyclicity follows from the edge count
        reached = {0}
        frontier = [0]
        adj: list[list[int]] = [[] for _ in range(k)]
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
        while frontier:
            v = frontier.pop()
            for w in adj[v]:
                if w not in reached:
                    reached.add(w)
                    frontier.append(w)
        if len(reached) != k:
            out.append("tree is disconnected")
    for v in range(k):
        if labels[v].bit_count() + deg[v] < 3:
            out.append(
                f"unstable vertex {v}: |label|={labels[v].bit_count()}, degree={deg[v]}"
            )
    return out


def validate_stability(n: int, labels: Iterable[int], edges: Iterable[tuple[int, int]]) -> tuple[bool, list[str]]:
    """Check the stable-tree invariants without constructing; list violations."""
    labels = tuple(labels)
    edges = tuple(sorted((min(a, b), max(a, b)) for a, b in edges))
    problems = _violations(n, labels, edges)
    return not problems, problems


def trivial_tree(n: int) -> StableTree:
    """The one-vertex tree labelled {1..n}: the fundamental class, codim 0."""
    if n < 4:
        raise TooFewPoints(f"no boundary divisors for n={n}")
    return StableTree(n, ((1 << n) - 1,), ())


def divisor_tree(part: BoundaryPartition) -> StableTree:
    """The two-vertex tree of a vital divisor: blocks joined by one edge."""
    return StableTree(part.n, (part.mask, part.other_side.mask), ((0, 1),))


def canonical_key(tree: StableTree) -> CanonicalTreeKey:
    """Presentation-independent encoding; equal iff trees are isomorphic.

    Rooted AHU form: the root is the vertex whose label contains marked
    index 1, child encodings are sorted, labels are embedded as index lists.
    """
    root = next(v for v, lab in enumerate(tree.labels) if lab & 1)
    adj: list[list[int]] = [[] for _ in tree.labels]
    for a, b in tree.edges:
        adj[a].append(b)
        adj[b].append(a)

    def encode(v: int, parent: int) -> str:
        subs = sorted(encode(w, v) for w in adj[v] if w != parent)
        lab = ",".join(map(str, tree.label_indices(v)))
        return "(" + lab + ":" + "".join(subs) + ")"

    return encode(root, -1)


def subtree_key(tree: StableTree, v: int, parent: int) -> str:
    """Canonical encoding of the branch rooted at ``v`` away from ``parent``.

    Used to order edge flags deterministically; same encoding scheme as
    :func:`canonical_key` but rooted at ``v``.
    """
    adj: list[list[int]] = [[] for _ in tree.labels]
    for a, b in tree.edges:
        adj[a].append(b)
        adj[b].append(a)

    def encode(u: int, par: int) -> str:
        subs = sorted(encode(w, u) for w in adj[u] if w != par)
        lab = ",".join(map(str, tree.label_indices(u)))
        return "(" + lab + ":" + "".join(subs) + ")"

    return encode(v, parent)


@dataclass(frozen=True)
class FormalCycle:
    """A finite rational combination of stable trees of one codimension.

    Terms are keyed by canonical tree key, so isomorphic trees merge and a
    representative presentation is kept alongside each coefficient.  Zero
    coefficients are never stored.  The empty combination is allowed and
    carries its codimension explicitly.
    """

    n: int
    codim: int
    terms: Mapping[CanonicalTreeKey, tuple[StableTree, Fraction]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for key, (tree, coeff) in self.terms.items():
            if tree.n != self.n or tree.codim != self.codim:
                raise MixedCodimension(
                    f"term {key} has (n, codim)=({tree.n},{tree.codim}), "
                    f"cycle declares ({self.n},{self.codim})"
                )
            if coeff == 0:
                raise ValueError("zero coefficient stored in a formal cycle")

    @classmethod
    def zero(cls, n: int, codim: int) -> "FormalCycle":
        return cls(n, codim, {})

    @classmethod
    def of(cls, pairs: Iterable[tuple[StableTree, Fraction | int]]) -> "FormalCycle":
        """Sum of coefficient-weighted trees; all must share n and codim."""
        pairs = [(t, Fraction(c)) for t, c in pairs]
        if not pairs:
            raise ValueError("cannot infer n and codim from an empty term list; use zero()")
        n, codim = pairs[0][0].n, pairs[0][0].codim
        acc: dict[CanonicalTreeKey, tuple[StableTree, Fraction]] = {}
        for tree, coeff in pairs:
            _accumulate(acc, tree, coeff)
        return cls(n, codim, acc)

    def __iter__(self) -> Iterator[tuple[StableTree, Fraction]]:
        return iter(self.terms.values())

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "FormalCycle") -> "FormalCycle":
        if (self.n, self.codim) != (other.n, other.codim):
            raise MixedCodimension(
                f"cannot add cycles of (n, codim) ({self.n},{self.codim}) "
                f"and ({other.n},{other.codim})"
            )
        acc = dict(self.terms)
        for tree, coeff in other:
            _accumulate(acc, tree, coeff)
        return FormalCycle(self.n, self.codim, acc)

    def scale(self, factor: Fraction | int) -> "FormalCycle":
        factor = Fraction(factor)
        if factor == 0:
            return FormalCycle.zero(self.n, self.codim)
        return FormalCycle(
            self.n,
            self.codim,
            {k: (t, c * factor) for k, (t, c) in self.terms.items()},
        )

    def total(self) -> Fraction:
        """Sum of all coefficients (the intersection number at top codim)."""
        return sum((c for _, c in self), Fraction(0))


def _accumulate(
    acc: dict[CanonicalTreeKey, tuple[StableTree, Fraction]],
    tree: StableTree,
    coeff: Fraction,
) -> None:
    if coeff == 0:
        return
    key = canonical_key(tree)
    prev = acc.get(key)
    if prev is None:
        acc[key] = (tree, coeff)
        return
    new = prev[1] + coeff
    if new == 0:
        del acc[key]
    else:
        acc[key] = (prev[0], new)


def cycle_add(a: FormalCycle, b: FormalCycle) -> FormalCycle:
    return a + b


def cycle_scale(c: FormalCycle, factor: Fraction | int) -> FormalCycle:
    return c.scale(factor)


def cycle_total(c: FormalCycle) -> Fraction:
    return c.total()

"""Intersection of vital boundary divisors with boundary strata.

The product of a divisor with a stratum tree is again a formal sum of
trees, one codimension higher, computed by a coloring case analysis
(Kontsevich-Manin style tree calculus):

* Color each vertex by its label's position relative to the partition
  {I0, I1}: red if the label sits inside I0, blue if inside I1, black if it
  meets both, white if empty.
* Two or more black vertices: the divisor misses the stratum, product 0.
* Exactly one black vertex: unless a red-blue edge (or a branch mixing both
  colors) forces emptiness, split the black vertex so that the new edge
  separates red from blue; the unique such tree enters with coefficient +1.
* No black vertex: if a single edge separates red from blue, the stratum is
  self-intersection-like and the product is minus a sum over flag splits of
  the edge's endpoints; if only a vertex separates, split it as above; if
  nothing separates, the product is 0.

Products of n-3 divisors land in codimension n-3 (points) and the sum of
coefficients is the intersection number, always an integer.

Everything is deterministic; a :class:`MemoStore` caches single-step
products keyed by (partition literal, canonical tree key) and finished top
products keyed by the sorted factor multiset.  Entries are write-once:
rewriting with a different value raises, so cache corruption cannot pass
silently.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Sequence

from .combinat import BoundaryPartition, indices_of
from .divisors import QDivisor
from .errors import (
    CodimensionOverflow,
    EngineError,
    MemoConflict,
    PairContainsE,
    WrongArity,
)
from .trees import (
    CanonicalTreeKey,
    FormalCycle,
    StableTree,
    canonical_key,
    subtree_key,
    trivial_tree,
)

# A flag at a vertex is either a marked index it carries or an incident
# edge-end, identified by the neighbor on the other side.
Flag = tuple[str, int]
PairRule = Callable[[StableTree, int, Flag, Sequence[Flag]], tuple[Flag, Flag]]


def mark_flag(i: int) -> Flag:
    return ("m", i)


def edge_flag(neighbor: int) -> Flag:
    return ("e", neighbor)


class VertexColor(Enum):
    RED = "red"
    BLUE = "blue"
    BLACK = "black"
    WHITE = "white"


def color_vertices(tree: StableTree, part: BoundaryPartition) -> list[VertexColor]:
    """Per-vertex colors of ``tree`` relative to the partition's two blocks.

    Swapping the blocks swaps red and blue and changes no product.
    """
    if tree.n != part.n:
        raise ValueError(f"tree has n={tree.n}, partition has n={part.n}")
    i1 = part.mask
    i0 = ((1 << part.n) - 1) ^ i1
    colors = []
    for lab in tree.labels:
        if lab == 0:
            colors.append(VertexColor.WHITE)
        elif lab & i0 and lab & i1:
            colors.append(VertexColor.BLACK)
        elif lab & i0:
            colors.append(VertexColor.RED)
        else:
            colors.append(VertexColor.BLUE)
    return colors


class MemoStore:
    """Write-once cache of single-step products and finished top products.

    Concurrent use is safe under the write-once contract: inserting an equal
    value is a no-op, inserting a different value for a present key raises
    :class:`MemoConflict` (an engine bug or a corrupted cache, never a
    recoverable state).
    """

    def __init__(self) -> None:
        self.cycles: dict[tuple[str, CanonicalTreeKey], FormalCycle] = {}
        self.products: dict[tuple, Fraction] = {}

    def get_cycle(self, part: BoundaryPartition, tree_key: CanonicalTreeKey) -> FormalCycle | None:
        return self.cycles.get((part.literal(), tree_key))

    def put_cycle(
        self, part: BoundaryPartition, tree_key: CanonicalTreeKey, value: FormalCycle
    ) -> None:
        key = (part.literal(), tree_key)
        prev = self.cycles.get(key)
        if prev is None:
            self.cycles[key] = value
        elif not _same_cycle(prev, value):
            raise MemoConflict(f"cycle memo rewrite with a different value at {key}")

    @staticmethod
    def product_key(n: int, parts: Iterable[BoundaryPartition]) -> tuple:
        return (n,) + tuple(sorted(p.literal() for p in parts))

    def get_product(self, key: tuple) -> Fraction | None:
        return self.products.get(key)

    def put_product(self, key: tuple, value: Fraction) -> None:
        prev = self.products.get(key)
        if prev is None:
            self.products[key] = value
        elif prev != value:
            raise MemoConflict(
                f"product memo rewrite at {key}: had {prev}, got {value}"
            )

    def clear(self) -> None:
        self.cycles.clear()
        self.products.clear()


def _same_cycle(a: FormalCycle, b: FormalCycle) -> bool:
    if (a.n, a.codim) != (b.n, b.codim) or len(a.terms) != len(b.terms):
        return False
    return all(
        key in b.terms and b.terms[key][1] == coeff
        for key, (_, coeff) in a.terms.items()
    )


_DEFAULT_MEMO = MemoStore()


def default_memo() -> MemoStore:
    """The process-wide store shared by all calls that do not pass their own."""
    return _DEFAULT_MEMO


def _resolve_memo(memo: MemoStore | None | bool, pair_rule: PairRule | None) -> MemoStore | None:
    # A custom pair rule changes intermediate cycles (not final numbers), so
    # it must never share a store with canonical runs.
    if pair_rule is not None:
        return None
    if memo is True:
        return _DEFAULT_MEMO
    if memo is False:
        return None
    return memo


def _split_vertex(
    tree: StableTree,
    v: int,
    label_keep: int,
    label_new: int,
    neighbors_to_new: Iterable[int],
) -> StableTree:
    """Replace vertex ``v`` by two vertices joined by a fresh edge.

    ``label_keep`` stays in slot ``v``; ``label_new`` goes to a fresh slot,
    which also takes over the edges towards ``neighbors_to_new``.
    """
    fresh = len(tree.labels)
    labels = list(tree.labels)
    labels[v] = label_keep
    labels.append(label_new)
    move = set(neighbors_to_new)
    edges = []
    for a, b in tree.edges:
        if a == v and b in move:
            edges.append((fresh, b))
        elif b == v and a in move:
            edges.append((a, fresh))
        else:
            edges.append((a, b))
    edges.append((v, fresh))
    return StableTree(tree.n, labels, edges)


def _components_without(tree: StableTree, v: int) -> list[list[int]]:
    """Vertex lists of the connected components of ``tree`` minus vertex ``v``.

    One component per neighbor of ``v``, listed in neighbor order.
    """
    adj: list[list[int]] = [[] for _ in tree.labels]
    for a, b in tree.edges:
        adj[a].append(b)
        adj[b].append(a)
    out = []
    for start in adj[v]:
        seen = {v, start}
        stack = [start]
        comp = [start]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
                    comp.append(w)
        out.append(comp)
    return out


def _vertex_flags(tree: StableTree, v: int) -> list[Flag]:
    """Flags of ``v`` in canonical order: marks ascending, then edge-ends
    ordered by the canonical encoding of the branch behind them."""
    marks = [mark_flag(i) for i in tree.label_indices(v)]
    edge_ends = sorted(
        (edge_flag(u) for u in tree.neighbors(v)),
        key=lambda f: (subtree_key(tree, f[1], v), f[1]),
    )
    return marks + edge_ends


def sigma_split(
    tree: StableTree,
    v: int,
    e_neighbor: int,
    pair: tuple[Flag, Flag],
) -> FormalCycle:
    """Formal sum of flag splits of vertex ``v`` away from a separating edge.

    The edge towards ``e_neighbor`` stays on the first half of every
    enumerated flag bipartition and the two ``pair`` flags anchor the second
    half; both halves need at least two flags.  Each admissible bipartition
    contributes the corresponding split tree with coefficient +1.
    """
    if e_neighbor not in tree.neighbors(v):
        raise ValueError(f"vertex {v} has no edge towards {e_neighbor}")
    e = edge_flag(e_neighbor)
    a1, a2 = pair
    if e in (a1, a2):
        raise PairContainsE(f"pair {pair} contains the split edge {e}")
    if a1 == a2:
        raise ValueError(f"pair flags must be distinct, got {pair}")
    flags = _vertex_flags(tree, v)
    for f in (a1, a2):
        if f not in flags:
            raise ValueError(f"flag {f} does not belong to vertex {v}")
    free = [f for f in flags if f not in (e, a1, a2)]
    terms = []
    for r in range(1, len(free) + 1):
        for chosen in combinations(free, r):
            half1 = set(chosen) | {e}
            label1 = 0
            label2 = 0
            to_new = []
            for f in flags:
                kind, value = f
                in_first = f in half1
                if kind == "m":
                    if in_first:
                        label1 |= 1 << (value - 1)
                    else:
                        label2 |= 1 << (value - 1)
                elif not in_first:
                    to_new.append(value)
            terms.append((_split_vertex(tree, v, label1, label2, to_new), Fraction(1)))
    if not terms:
        return FormalCycle.zero(tree.n, tree.codim + 1)
    return FormalCycle.of(terms)


def _canonical_pair(flags: Sequence[Flag]) -> tuple[Flag, Flag]:
    return flags[0], flags[1]


def intersect_divisor_tree(
    part: BoundaryPartition,
    tree: StableTree,
    pair_rule: PairRule | None = None,
) -> FormalCycle:
    """Product of one vital divisor with one stratum tree.

    Returns a formal cycle of codimension ``tree.codim + 1``; see the module
    docstring for the case analysis.  ``pair_rule`` overrides the canonical
    anchor-pair choice in the separating-edge case (final intersection
    numbers do not depend on it; intermediate cycles do).
    """
    n = tree.n
    if part.n != n:
        raise ValueError(f"partition has n={part.n}, tree has n={n}")
    if tree.codim + 1 > n - 3:
        raise CodimensionOverflow(
            f"product would have codimension {tree.codim + 1} > n-3 = {n - 3}"
        )
    out_codim = tree.codim + 1
    colors = color_vertices(tree, part)
    blacks = [v for v, c in enumerate(colors) if c is VertexColor.BLACK]
    i1 = part.mask
    i0 = ((1 << n) - 1) ^ i1

    if len(blacks) >= 2:
        return FormalCycle.zero(n, out_codim)

    reds = {v for v, c in enumerate(colors) if c is VertexColor.RED}
    blues = {v for v, c in enumerate(colors) if c is VertexColor.BLUE}

    if len(blacks) == 1:
        v = blacks[0]
        for a, b in tree.edges:
            if {colors[a], colors[b]} == {VertexColor.RED, VertexColor.BLUE}:
                return FormalCycle.zero(n, out_codim)
        to_new = []
        for comp in _components_without(tree, v):
            has_red = any(u in reds for u in comp)
            has_blue = any(u in blues for u in comp)
            if has_red and has_blue:
                # Bichromatic branch through white vertices: no refinement of
                # this stratum carries an edge with partition {I0, I1}.
                return FormalCycle.zero(n, out_codim)
            if not has_red and not has_blue:
                raise EngineError("colorless branch; leaves are always colored")
            if has_blue:
                to_new.append(comp[0])  # comp[0] is the neighbor of v
        split = _split_vertex(tree, v, tree.labels[v] & i0, tree.labels[v] & i1, to_new)
        return FormalCycle.of([(split, Fraction(1))])

    # no black vertex; both colors are present for any valid partition
    if not reds or not blues:
        raise EngineError("a valid partition colors at least one vertex on each side")

    separating_edges = []
    for a, b in tree.edges:
        comp_a = _side_of_edge(tree, a, b)
        reds_in_a = reds <= comp_a
        blues_in_a = blues <= comp_a
        if (reds_in_a and not (blues & comp_a)) or (blues_in_a and not (reds & comp_a)):
            separating_edges.append((a, b))
    if separating_edges:
        if len(separating_edges) > 1:
            raise EngineError(f"multiple separating edges {separating_edges}")
        a, b = separating_edges[0]
        total = _sigma_with_rule(tree, a, b, pair_rule) + _sigma_with_rule(tree, b, a, pair_rule)
        return total.scale(-1)

    separating_vertices = []
    for v in range(len(tree.labels)):
        comps = _components_without(tree, v)
        if all(not (reds & set(c)) or not (blues & set(c)) for c in comps):
            separating_vertices.append(v)
    if not separating_vertices:
        return FormalCycle.zero(n, out_codim)
    if len(separating_vertices) > 1:
        raise EngineError(f"multiple separating vertices {separating_vertices}")
    v = separating_vertices[0]
    to_new = []
    for comp in _components_without(tree, v):
        if blues & set(comp):
            to_new.append(comp[0])
    split = _split_vertex(tree, v, tree.labels[v] & i0, tree.labels[v] & i1, to_new)
    return FormalCycle.of([(split, Fraction(1))])


def _side_of_edge(tree: StableTree, a: int, b: int) -> set[int]:
    """Vertices of the component of ``tree`` minus edge (a, b) containing ``a``."""
    adj: list[list[int]] = [[] for _ in tree.labels]
    for x, y in tree.edges:
        adj[x].append(y)
        adj[y].append(x)
    seen = {a}
    stack = [a]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w == b and u == a:
                continue
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _sigma_with_rule(
    tree: StableTree, v: int, e_neighbor: int, pair_rule: PairRule | None
) -> FormalCycle:
    e = edge_flag(e_neighbor)
    candidates = [f for f in _vertex_flags(tree, v) if f != e]
    rule = pair_rule or (lambda _t, _v, _e, cands: _canonical_pair(cands))
    pair = rule(tree, v, e, candidates)
    return sigma_split(tree, v, e_neighbor, pair)


def intersect_divisor_cycle(
    part: BoundaryPartition,
    cycle: FormalCycle,
    memo: MemoStore | None | bool = True,
    pair_rule: PairRule | None = None,
) -> FormalCycle:
    """Linear extension of :func:`intersect_divisor_tree` over a formal cycle."""
    if cycle.codim + 1 > cycle.n - 3:
        raise CodimensionOverflow(
            f"product would have codimension {cycle.codim + 1} > n-3 = {cycle.n - 3}"
        )
    store = _resolve_memo(memo, pair_rule)
    acc: dict[CanonicalTreeKey, tuple[StableTree, Fraction]] = {}
    for key, (tree, coeff) in cycle.terms.items():
        sub = _memoized_tree_product(part, tree, key, store, pair_rule)
        _merge_scaled(acc, sub, coeff)
    return FormalCycle(cycle.n, cycle.codim + 1, acc)


def _memoized_tree_product(
    part: BoundaryPartition,
    tree: StableTree,
    tree_key: CanonicalTreeKey,
    store: MemoStore | None,
    pair_rule: PairRule | None,
) -> FormalCycle:
    if store is not None:
        hit = store.get_cycle(part, tree_key)
        if hit is not None:
            return hit
    value = intersect_divisor_tree(part, tree, pair_rule)
    if store is not None:
        store.put_cycle(part, tree_key, value)
    return value


def _merge_scaled(
    acc: dict[CanonicalTreeKey, tuple[StableTree, Fraction]],
    cycle: FormalCycle,
    factor: Fraction,
) -> None:
    if factor == 0:
        return
    for key, (tree, coeff) in cycle.terms.items():
        prev = acc.get(key)
        new = (prev[1] if prev else Fraction(0)) + coeff * factor
        if new == 0:
            acc.pop(key, None)
        else:
            acc[key] = (tree, new)


def product_number(
    divisors: Sequence[BoundaryPartition],
    n: int,
    memo: MemoStore | None | bool = True,
    pair_rule: PairRule | None = None,
) -> Fraction:
    """Intersection number of exactly n-3 vital divisors (repeats allowed).

    Factors are folded in canonical order, so the result is independent of
    the input ordering and partial products are shared across calls through
    the memo.  The result of a boundary-divisor product is always an
    integer; a non-integer total indicates an engine bug and raises.
    """
    if len(divisors) != n - 3:
        raise WrongArity(f"need exactly n-3 = {n - 3} divisors, got {len(divisors)}")
    for part in divisors:
        if part.n != n:
            raise ValueError(f"partition {part!r} has n={part.n}, expected {n}")
    store = _resolve_memo(memo, pair_rule)
    ordered = sorted(divisors)
    key = MemoStore.product_key(n, ordered)
    if store is not None:
        hit = store.get_product(key)
        if hit is not None:
            return hit
    cycle = FormalCycle.of([(trivial_tree(n), Fraction(1))])
    for part in ordered:
        cycle = intersect_divisor_cycle(part, cycle, store, pair_rule)
    total = cycle.total()
    if total.denominator != 1:
        raise EngineError(f"boundary product came out non-integral: {total}")
    if store is not None:
        store.put_product(key, total)
    return total


def qdivisor_product(
    factors: Sequence[QDivisor],
    memo: MemoStore | None | bool = True,
    pair_rule: PairRule | None = None,
) -> Fraction:
    """Top intersection number of n-3 rational boundary divisors.

    Expands multilinearly by folding one factor at a time into a formal
    cycle; single-step products are memoized, so repeated evaluations with
    different coefficient vectors share all tree combinatorics.
    """
    if not factors:
        raise WrongArity("need at least one divisor factor")
    n = factors[0].n
    if any(d.n != n for d in factors):
        raise ValueError("all factors must share the same n")
    if len(factors) != n - 3:
        raise WrongArity(f"need exactly n-3 = {n - 3} factors, got {len(factors)}")
    store = _resolve_memo(memo, pair_rule)
    cycle = FormalCycle.of([(trivial_tree(n), Fraction(1))])
    for div in factors:
        acc: dict[CanonicalTreeKey, tuple[StableTree, Fraction]] = {}
        for key, (tree, coeff) in cycle.terms.items():
            for part, weight in div.coefficients.items():
                sub = _memoized_tree_product(part, tree, key, store, pair_rule)
                _merge_scaled(acc, sub, coeff * weight)
        cycle = FormalCycle(n, cycle.codim + 1, acc)
    return cycle.total()


def qdivisor_power(
    div: QDivisor,
    n: int,
    memo: MemoStore | None | bool = True,
    pair_rule: PairRule | None = None,
) -> Fraction:
    """The (n-3)-fold self-intersection number of a rational divisor."""
    if div.n != n:
        raise ValueError(f"divisor has n={div.n}, expected {n}")
    return qdivisor_product([div] * (n - 3), memo, pair_rule)

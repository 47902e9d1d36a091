"""Uniform hypergraphs and the combinatorial primitives used everywhere else.

Vertices are the integers ``0..n-1``; an edge is a strictly increasing tuple
of ``r`` vertices.  A :class:`Hypergraph` is immutable once built, so the
lazily computed indices (links, degrees, pair codegrees) are safe to cache.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Iterable, Sequence

from .errors import (
    BudgetExceeded,
    InvalidPair,
    InvalidSize,
    InvalidUniformity,
    InvariantViolation,
    PreconditionError,
    VertexRangeError,
)

DEFAULT_BUDGET = 2_000_000

Edge = tuple[int, ...]


class Hypergraph:
    """An r-uniform hypergraph on the vertex set ``{0, ..., n-1}``.

    Repeated edges in the input collapse to one.  ``edges`` is always sorted
    lexicographically so iteration order is deterministic.
    """

    def __init__(self, r: int, n: int, edges: Iterable[Iterable[int]] = ()):
        if r < 1:
            raise InvalidUniformity(f"uniformity must be positive, got {r}")
        if n < 0:
            raise InvalidSize(f"vertex count must be non-negative, got {n}")
        norm = set()
        for e in edges:
            t = tuple(sorted(e))
            if len(t) != r or len(set(t)) != r:
                raise InvalidUniformity(f"edge {tuple(e)} is not a set of {r} distinct vertices")
            if t[0] < 0 or t[-1] >= n:
                raise VertexRangeError(f"edge {t} has a vertex outside 0..{n - 1}")
            norm.add(t)
        self.r = r
        self.n = n
        self.edge_set: frozenset[Edge] = frozenset(norm)
        self.edges: tuple[Edge, ...] = tuple(sorted(norm))

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def __contains__(self, e) -> bool:
        return tuple(sorted(e)) in self.edge_set

    def __eq__(self, other) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return self.r == other.r and self.n == other.n and self.edge_set == other.edge_set

    def __hash__(self) -> int:
        return hash((self.r, self.n, self.edge_set))

    def __repr__(self) -> str:
        return f"Hypergraph(r={self.r}, n={self.n}, m={len(self.edges)})"

    @property
    def vertices(self) -> range:
        return range(self.n)

    @cached_property
    def links(self) -> tuple[tuple[Edge, ...], ...]:
        out: list[list[Edge]] = [[] for _ in range(self.n)]
        for e in self.edges:
            for i, v in enumerate(e):
                out[v].append(e[:i] + e[i + 1:])
        return tuple(tuple(sorted(l)) for l in out)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(l) for l in self.links)

    @cached_property
    def pair_codegrees(self) -> dict[tuple[int, int], int]:
        """Number of edges through each pair that lies in at least one edge."""
        cnt: dict[tuple[int, int], int] = defaultdict(int)
        for e in self.edges:
            for p in itertools.combinations(e, 2):
                cnt[p] += 1
        return dict(cnt)

    @cached_property
    def shadow_adjacency(self) -> tuple[int, ...]:
        """Bitmask per vertex of the vertices it shares an edge with."""
        adj = [0] * self.n
        for u, v in self.pair_codegrees:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return tuple(adj)

    def covered_vertices(self) -> list[int]:
        return [v for v in range(self.n) if self.degrees[v]]


@dataclass(frozen=True)
class VertexPartition:
    """Disjoint vertex blocks; ``block_of`` maps each covered vertex to its block."""

    blocks: tuple[tuple[int, ...], ...]
    block_of: dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        owner: dict[int, int] = {}
        for i, b in enumerate(blocks):
            for v in b:
                if v in owner:
                    raise InvariantViolation(f"vertex {v} lies in blocks {owner[v]} and {i}")
                owner[v] = i
        object.__setattr__(self, "block_of", owner)

    def __len__(self) -> int:
        return len(self.blocks)

    @property
    def covered(self) -> frozenset[int]:
        return frozenset(self.block_of)

    def sizes(self) -> list[int]:
        return [len(b) for b in self.blocks]


# ---------------------------------------------------------------------------
# small constructors


def complete(n: int, r: int = 3) -> Hypergraph:
    return Hypergraph(r, n, itertools.combinations(range(n), r))


def star(n: int, center: int = 0, r: int = 3) -> Hypergraph:
    others = [v for v in range(n) if v != center]
    return Hypergraph(r, n, ((center,) + c for c in itertools.combinations(others, r - 1)))


FANO_LINES = ((0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5))


def fano() -> Hypergraph:
    return Hypergraph(3, 7, FANO_LINES)


def induced(H: Hypergraph, S: Iterable[int]) -> Hypergraph:
    """H[S] on the same vertex labels."""
    s = set(S)
    return Hypergraph(H.r, H.n, (e for e in H.edges if s.issuperset(e)))


def compact(H: Hypergraph, keep: Sequence[int]) -> tuple[Hypergraph, list[int]]:
    """Induced subgraph on ``keep`` relabelled to 0..len(keep)-1.

    Returns the new graph and the list mapping new labels back to old ones.
    """
    keep = sorted(set(keep))
    pos = {v: i for i, v in enumerate(keep)}
    edges = [tuple(pos[v] for v in e) for e in H.edges if all(v in pos for v in e)]
    return Hypergraph(H.r, len(keep), edges), keep


def remove_vertices(H: Hypergraph, Z: Iterable[int]) -> tuple[Hypergraph, list[int]]:
    z = set(Z)
    return compact(H, [v for v in range(H.n) if v not in z])


def _check_vertex(H: Hypergraph, v: int) -> None:
    if not 0 <= v < H.n:
        raise VertexRangeError(f"vertex {v} outside 0..{H.n - 1}")


# ---------------------------------------------------------------------------
# shadows, densities, links, codegrees


def shadow(H: Hypergraph) -> Hypergraph:
    if H.r < 2:
        raise InvalidUniformity("shadow needs uniformity at least 2")
    sub = set()
    for e in H.edges:
        sub.update(itertools.combinations(e, H.r - 1))
    return Hypergraph(H.r - 1, H.n, sub)


def densities(H: Hypergraph) -> tuple[Fraction, Fraction]:
    """(shadow density, edge density) as exact fractions."""
    if H.n < H.r:
        raise InvalidSize(f"need n >= r, got n={H.n}, r={H.r}")
    return (
        Fraction(len(shadow(H)), comb(H.n, H.r - 1)),
        Fraction(len(H), comb(H.n, H.r)),
    )


def link(H: Hypergraph, v: int) -> Hypergraph:
    _check_vertex(H, v)
    return Hypergraph(H.r - 1, H.n, H.links[v])


def degree(H: Hypergraph, v: int) -> int:
    _check_vertex(H, v)
    return H.degrees[v]


def codegree(H: Hypergraph, u: int, v: int) -> int:
    _check_vertex(H, u)
    _check_vertex(H, v)
    if u == v:
        raise InvalidPair("codegree needs two distinct vertices")
    return H.pair_codegrees.get((min(u, v), max(u, v)), 0)


def min_max_codegree(H: Hypergraph) -> tuple[int, int]:
    if H.n < 2:
        raise InvalidSize("codegrees need at least two vertices")
    cd = H.pair_codegrees
    lo = 0 if len(cd) < comb(H.n, 2) else min(cd.values())
    hi = max(cd.values(), default=0)
    return lo, hi


def is_two_covered(H: Hypergraph, S: Iterable[int]) -> bool:
    S = sorted(set(S))
    for v in S:
        _check_vertex(H, v)
    cd = H.pair_codegrees
    return all(p in cd for p in itertools.combinations(S, 2))


# ---------------------------------------------------------------------------
# blow-ups


def blow_up(G: Hypergraph, sizes: Sequence[int], allow_zero: bool = False) -> tuple[Hypergraph, VertexPartition]:
    """Replace vertex j of G by a block of ``sizes[j]`` new vertices.

    Blocks get consecutive labels in order.  A zero size deletes the vertex
    and is only accepted with ``allow_zero=True``.
    """
    if len(sizes) != G.n:
        raise InvalidSize(f"need {G.n} block sizes, got {len(sizes)}")
    for s in sizes:
        if s < 0 or (s == 0 and not allow_zero):
            raise InvalidSize(f"invalid block size {s}")
    blocks = []
    start = 0
    for s in sizes:
        blocks.append(tuple(range(start, start + s)))
        start += s
    edges = []
    for e in G.edges:
        edges.extend(itertools.product(*(blocks[j] for j in e)))
    return Hypergraph(G.r, start, edges), VertexPartition(tuple(blocks))


def blow_up_edge_count(G: Hypergraph, sizes: Sequence[int]) -> int:
    total = 0
    for e in G.edges:
        p = 1
        for j in e:
            p *= sizes[j]
        total += p
    return total


# ---------------------------------------------------------------------------
# transversals


def _edge_masks(H: Hypergraph) -> list[int]:
    out = []
    for e in H.edges:
        m = 0
        for v in e:
            m |= 1 << v
        out.append(m)
    return out


def min_transversal(H: Hypergraph, budget: int = DEFAULT_BUDGET) -> tuple[int, ...]:
    """A minimum vertex set meeting every edge (exact, iterative deepening)."""
    masks = _edge_masks(H)
    if not masks:
        return ()
    nodes = 0

    def hit(cover: int, depth: int) -> int | None:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded("transversal_number", budget)
        for e in masks:
            if not e & cover:
                break
        else:
            return cover
        if depth == 0:
            return None
        bits = e
        while bits:
            b = bits & -bits
            bits ^= b
            found = hit(cover | b, depth - 1)
            if found is not None:
                return found
        return None

    for k in range(1, H.n + 1):
        found = hit(0, k)
        if found is not None:
            return tuple(v for v in range(H.n) if found >> v & 1)
    raise InvariantViolation("no transversal found")


def transversal_number(H: Hypergraph, budget: int = DEFAULT_BUDGET) -> int:
    return len(min_transversal(H, budget))


# ---------------------------------------------------------------------------
# equivalence classes


def equivalence_classes(H: Hypergraph) -> VertexPartition:
    """Group vertices with identical links; classes ordered by smallest member."""
    groups: dict[tuple[Edge, ...], list[int]] = {}
    for v in range(H.n):
        groups.setdefault(H.links[v], []).append(v)
    part = VertexPartition(tuple(sorted(groups.values())))
    # identical links force non-adjacency; re-check so a representation bug cannot hide
    for e in H.edges:
        cls = [part.block_of[v] for v in e]
        if len(set(cls)) != len(cls):
            raise InvariantViolation(f"edge {e} contains two equivalent vertices")
    return part


def psi(H: Hypergraph) -> int:
    return sum(len(c) ** 2 for c in equivalence_classes(H).blocks)


# ---------------------------------------------------------------------------
# semibipartite


def check_semibipartition(H: Hypergraph, A: Iterable[int]) -> bool:
    """True iff every edge meets A in exactly one vertex."""
    a = set(A)
    return all(sum(v in a for v in e) == 1 for e in H.edges)


def is_semibipartite(H: Hypergraph, budget: int = DEFAULT_BUDGET) -> VertexPartition | None:
    """Find (A, B) with every edge meeting A exactly once, or None.

    Backtracking with unit propagation.  The returned partition has blocks
    ``(A, B)``; isolated vertices go to B.
    """
    if H.r != 3:
        raise InvalidUniformity("semibipartite search is implemented for 3-graphs")
    inc: list[list[Edge]] = [[] for _ in range(H.n)]
    for e in H.edges:
        for v in e:
            inc[v].append(e)
    state: list[bool | None] = [None] * H.n
    order = sorted(H.covered_vertices(), key=lambda v: (-H.degrees[v], v))
    nodes = 0

    def assign(v: int, val: bool, trail: list[int]) -> bool:
        stack = [(v, val)]
        while stack:
            v, val = stack.pop()
            if state[v] is not None:
                if state[v] != val:
                    return False
                continue
            state[v] = val
            trail.append(v)
            for e in inc[v]:
                ins = [u for u in e if state[u] is True]
                free = [u for u in e if state[u] is None]
                if len(ins) > 1:
                    return False
                if len(ins) == 1:
                    stack.extend((u, False) for u in free)
                elif not free:
                    return False
                elif len(free) == 1:
                    stack.append((free[0], True))
        return True

    def search(i: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded("is_semibipartite", budget)
        while i < len(order) and state[order[i]] is not None:
            i += 1
        if i == len(order):
            return True
        v = order[i]
        for val in (True, False):
            trail: list[int] = []
            if assign(v, val, trail) and search(i + 1):
                return True
            for u in trail:
                state[u] = None
        return False

    if not search(0):
        return None
    A = tuple(v for v in range(H.n) if state[v] is True)
    B = tuple(v for v in range(H.n) if state[v] is not True)
    if not check_semibipartition(H, A):
        raise InvariantViolation("semibipartite witness failed re-verification")
    return VertexPartition((A, B))


# ---------------------------------------------------------------------------
# edit distance


def edit_distance_d1(H: Hypergraph, H2: Hypergraph, budget: int = DEFAULT_BUDGET, max_vertices: int = 10) -> int:
    """min |H ^ pi(H2)| over all relabelings pi (branch and bound)."""
    if H.n != H2.n:
        raise InvalidSize(f"vertex counts differ: {H.n} vs {H2.n}")
    if H.r != H2.r:
        raise InvalidUniformity("uniformities differ")
    if H.n > max_vertices:
        raise PreconditionError(f"exhaustive d1 limited to {max_vertices} vertices")
    n = H.n
    target = H.edge_set
    order = sorted(range(n), key=lambda v: (-H2.degrees[v], v))
    rank = {v: i for i, v in enumerate(order)}
    # edges of H2 grouped by the step at which they become fully mapped
    closes: list[list[Edge]] = [[] for _ in range(n)]
    for e in H2.edges:
        closes[max(rank[v] for v in e)].append(e)
    m1, m2 = len(H), len(H2)
    best = m1 + m2
    image = [-1] * n
    used = [False] * n
    nodes = 0

    def rec(depth: int, matched: int, pending: int) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded("edit_distance_d1", budget)
        if m1 + m2 - 2 * min(matched + pending, m1) >= best:
            return
        if depth == n:
            best = m1 + m2 - 2 * matched
            return
        v = order[depth]
        for w in range(n):
            if used[w]:
                continue
            image[v] = w
            used[w] = True
            gain = sum(tuple(sorted(image[u] for u in e)) in target for e in closes[depth])
            rec(depth + 1, matched + gain, pending - len(closes[depth]))
            used[w] = False
        image[v] = -1

    rec(0, 0, m2)
    return best


# ---------------------------------------------------------------------------
# low-degree set


def _below_sqrt_threshold(value: Fraction, base: Fraction, coef: Fraction, eps: Fraction) -> bool:
    """Exactly decide ``value <= base - coef * sqrt(eps)`` for coef, eps >= 0."""
    gap = base - value
    if gap < 0:
        return False
    return coef * coef * eps <= gap * gap


def Z_eps(H: Hypergraph, lam, eps) -> list[int]:
    """Vertices with degree at most (3*lam - 2*sqrt(eps)) * n^2, decided exactly."""
    lam, eps = Fraction(lam), Fraction(eps)
    if not 0 < eps < 1:
        raise PreconditionError("eps must lie in (0, 1)")
    n2 = H.n * H.n
    base = 3 * lam * n2
    return [v for v in range(H.n) if _below_sqrt_threshold(Fraction(H.degrees[v]), base, Fraction(2 * n2), eps)]


# ---------------------------------------------------------------------------
# cliques in 2-graphs


def _mis_size(mask: int, adj: list[int], counter: list[int], budget: int) -> int:
    counter[0] += 1
    if counter[0] > budget:
        raise BudgetExceeded("clique_number", budget)
    best_v, best_d = -1, -1
    m = mask
    while m:
        b = m & -m
        v = b.bit_length() - 1
        m ^= b
        d = bin(adj[v] & mask).count("1")
        if d > best_d:
            best_v, best_d = v, d
    if best_d <= 0:
        return bin(mask).count("1")
    v = best_v
    without = _mis_size(mask & ~(1 << v), adj, counter, budget)
    with_v = 1 + _mis_size(mask & ~(1 << v) & ~adj[v], adj, counter, budget)
    return max(without, with_v)


def clique_number(G: Hypergraph, vertices: Iterable[int] | None = None, budget: int = DEFAULT_BUDGET) -> int:
    """Exact clique number of a 2-graph restricted to ``vertices``.

    Works on the complement, one connected component at a time, which is
    fast for the nearly complete multipartite graphs met here.
    """
    if G.r != 2:
        raise InvalidUniformity("clique number is defined here for 2-graphs")
    verts = sorted(set(range(G.n) if vertices is None else vertices))
    if not verts:
        return 0
    vs = set(verts)
    adj = [0] * G.n
    for u, v in G.edges:
        if u in vs and v in vs:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
    full = 0
    for v in verts:
        full |= 1 << v
    comp_adj = [(full & ~adj[v] & ~(1 << v)) if v in vs else 0 for v in range(G.n)]
    seen = 0
    total = 0
    counter = [0]
    for v in verts:
        if seen >> v & 1:
            continue
        comp = 1 << v
        frontier = comp
        while frontier:
            b = frontier & -frontier
            frontier ^= b
            new = comp_adj[b.bit_length() - 1] & ~comp
            comp |= new
            frontier |= new
        seen |= comp
        total += _mis_size(comp, comp_adj, counter, budget)
    return total

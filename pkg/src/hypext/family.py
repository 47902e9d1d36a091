"""Cores, colourability and membership in the forbidden family.

A member F of the family (for target configurations ``G_list`` and size
bound ``n_t``) has a 2-covered vertex set S with ``|S| <= n_t``,
``|F| <= C(|S|, 3)`` and ``tau(F[S]) >= 2``, and admits no homomorphism into
any configuration of ``G_list``.

Searches take node budgets.  When a budget runs out, the public predicates
return ``None`` (indeterminate) instead of guessing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, InvalidUniformity, InvariantViolation, PreconditionError
from .hcore import DEFAULT_BUDGET, Hypergraph, induced, is_two_covered, min_transversal, transversal_number

KIND_K = "K"
KIND_KHAT = "K-hat"


@dataclass(frozen=True)
class CoreWitness:
    S: tuple[int, ...]
    ell: int
    kind: str
    tau: int | None = None

    @property
    def tau_ge_2(self) -> bool | None:
        return None if self.tau is None else self.tau >= 2


@dataclass(frozen=True)
class HomMap:
    map: tuple[int, ...]

    def image(self, F: Hypergraph) -> list[tuple[int, ...]]:
        return [tuple(sorted(self.map[v] for v in e)) for e in F.edges]

    def verify(self, F: Hypergraph, G: Hypergraph) -> bool:
        if len(self.map) != F.n:
            return False
        return all(len(set(e)) == F.r and e in G.edge_set for e in self.image(F))


def _edge_limit(ell: int, kind: str) -> int:
    if kind == KIND_K:
        return comb(ell, 2)
    if kind == KIND_KHAT:
        return comb(ell, 3)
    raise PreconditionError(f"unknown core kind {kind!r}")


# ---------------------------------------------------------------------------
# cliques of the shadow graph


def _bits(mask: int) -> Iterator[int]:
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


def maximal_cliques(adj: Sequence[int], vertices: Iterable[int]) -> list[tuple[int, ...]]:
    """Bron-Kerbosch with pivoting on bitmask adjacency."""
    out: list[tuple[int, ...]] = []

    def bk(R: int, P: int, X: int) -> None:
        if not P and not X:
            out.append(tuple(_bits(R)))
            return
        pivot = max(_bits(P | X), key=lambda u: bin(P & adj[u]).count("1"))
        for v in _bits(P & ~adj[pivot]):
            bk(R | 1 << v, P & adj[v], X & adj[v])
            P &= ~(1 << v)
            X |= 1 << v

    P = 0
    for v in vertices:
        P |= 1 << v
    if P:
        bk(0, P, 0)
    return sorted(out)


def two_covered_sets(H: Hypergraph, min_size: int, max_size: int) -> list[tuple[int, ...]]:
    """All 2-covered vertex sets with size in [min_size, max_size], largest first."""
    found: set[tuple[int, ...]] = set()
    for K in maximal_cliques(H.shadow_adjacency, H.covered_vertices()):
        for size in range(min(len(K), max_size), min_size - 1, -1):
            found.update(itertools.combinations(K, size))
    return sorted(found, key=lambda S: (-len(S), S))


def iter_cores(F: Hypergraph, max_ell: int) -> list[tuple[int, ...]]:
    """2-covered sets that are maximal subject to ``|S| <= max_ell``."""
    out: set[tuple[int, ...]] = set()
    for K in maximal_cliques(F.shadow_adjacency, F.covered_vertices()):
        if len(K) <= max_ell:
            out.add(K)
        else:
            out.update(itertools.combinations(K, max_ell))
    return sorted(out, key=lambda S: (-len(S), S))


def find_core(F: Hypergraph, ell: int, kind: str = KIND_KHAT, with_tau: bool = False,
              require_tau2: bool = False, budget: int = DEFAULT_BUDGET) -> CoreWitness | None:
    """A 2-covered ell-set of F, provided |F| passes the edge gate of ``kind``."""
    if len(F) > _edge_limit(ell, kind):
        return None
    for K in maximal_cliques(F.shadow_adjacency, F.covered_vertices()):
        if len(K) < ell:
            continue
        for S in itertools.combinations(K, ell):
            tau = transversal_number(induced(F, S), budget) if (with_tau or require_tau2) else None
            w = CoreWitness(S, ell, kind, tau)
            if not is_two_covered(F, S):
                raise InvariantViolation("clique of the shadow is not 2-covered")
            if not require_tau2 or tau >= 2:
                return w
    return None


# ---------------------------------------------------------------------------
# homomorphisms


def _completion_masks(G: Hypergraph) -> dict[tuple[int, ...], int]:
    comp: dict[tuple[int, ...], int] = {}
    for e in G.edges:
        for i, v in enumerate(e):
            key = e[:i] + e[i + 1:]
            comp[key] = comp.get(key, 0) | (1 << v)
    return comp


def find_homomorphism(F: Hypergraph, G: Hypergraph, budget: int = DEFAULT_BUDGET) -> HomMap | None:
    """A vertex map sending every edge of F onto an edge of G, or None.

    Backtracking over bitmask domains: most constrained vertex first, shadow
    adjacency pruning and forward checking on edges with one free vertex.
    ``None`` is a certificate of non-existence; running out of budget raises.
    """
    if F.r != G.r:
        raise InvalidUniformity("uniformities differ")
    if not F.edges:
        if F.n and not G.n:
            return None
        return HomMap(tuple([0] * F.n))
    if not G.edges:
        return None
    r = F.r
    comp = _completion_masks(G)
    adjG = G.shadow_adjacency
    covered_G = 0
    for v in G.covered_vertices():
        covered_G |= 1 << v
    inc: list[list[tuple[int, ...]]] = [[] for _ in range(F.n)]
    for e in F.edges:
        for v in e:
            inc[v].append(e)
    nbrF = [list(_bits(m)) for m in F.shadow_adjacency]
    active = [v for v in range(F.n) if inc[v]]
    assigned = [-1] * F.n
    nodes = 0

    def rec(dom: list[int], left: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded("find_homomorphism", budget)
        if left == 0:
            return True
        v = min((u for u in active if assigned[u] < 0),
                key=lambda u: (bin(dom[u]).count("1"), -len(inc[u]), u))
        for a in _bits(dom[v]):
            nd = dom[:]
            assigned[v] = a
            ok = True
            for w in nbrF[v]:
                if assigned[w] < 0:
                    nd[w] &= adjG[a]
                    if not nd[w]:
                        ok = False
                        break
            if ok:
                for e in inc[v]:
                    free = [x for x in e if assigned[x] < 0]
                    if not free:
                        img = tuple(sorted(assigned[x] for x in e))
                        if len(set(img)) < r or img not in G.edge_set:
                            ok = False
                            break
                    elif len(free) == 1:
                        key = tuple(sorted(assigned[x] for x in e if x != free[0]))
                        if len(set(key)) < r - 1:
                            ok = False
                            break
                        nd[free[0]] &= comp.get(key, 0)
                        if not nd[free[0]]:
                            ok = False
                            break
            if ok and rec(nd, left - 1):
                return True
            assigned[v] = -1
        return False

    dom0 = [covered_G] * F.n
    if not rec(dom0, len(active)):
        return None
    phi = tuple(a if a >= 0 else 0 for a in assigned)
    hm = HomMap(phi)
    if not hm.verify(F, G):
        raise InvariantViolation("homomorphism failed re-verification")
    return hm


def is_colorable(F: Hypergraph, G: Hypergraph, budget: int = DEFAULT_BUDGET) -> bool:
    return find_homomorphism(F, G, budget) is not None


# ---------------------------------------------------------------------------
# transversal witnesses and reductions


def tau_witness(H: Hypergraph) -> Hypergraph | None:
    """A subgraph with at most r+1 edges and transversal number >= 2, if tau(H) >= 2."""
    edges = H.edges
    if not edges:
        return None
    if any(all(v in e for e in edges) for v in edges[0]):
        return None
    pairs = sorted(itertools.combinations(edges, 2), key=lambda p: (len(set(p[0]) & set(p[1])), p))
    e1, e2 = pairs[0]
    chosen = [e1, e2]
    for v in sorted(set(e1) & set(e2)):
        chosen.append(next(e for e in edges if v not in e))
    W = Hypergraph(H.r, H.n, chosen)
    if len(W) > H.r + 1 or transversal_number(W) < 2:
        raise InvariantViolation("tau witness construction failed")
    return W


def _cover_pairs(F: Hypergraph, S: Sequence[int], base: Iterable[tuple[int, ...]]) -> set[tuple[int, ...]]:
    chosen = set(base)
    covered = set()
    for e in chosen:
        covered.update(itertools.combinations(e, 2))
    for p in itertools.combinations(sorted(S), 2):
        if p in covered:
            continue
        e = next(e for e in F.edges if p[0] in e and p[1] in e)
        chosen.add(e)
        covered.update(itertools.combinations(e, 2))
    return chosen


def reduce_to_K(F: Hypergraph, S: Iterable[int], target_s: int | None = None) -> Hypergraph:
    """A subgraph F' with core S' of at most C(|S'|, 2) edges and tau(F'[S']) >= 2.

    S' = S, or an s-subset of S containing the small tau-witness when
    ``target_s`` is given.  Use :func:`reduction_core` to recover S'.
    """
    return _reduce(F, S, target_s)[0]


def reduction_core(F: Hypergraph, S: Iterable[int], target_s: int | None = None) -> tuple[int, ...]:
    return _reduce(F, S, target_s)[1]


def _reduce(F: Hypergraph, S: Iterable[int], target_s: int | None):
    S = tuple(sorted(set(S)))
    if not is_two_covered(F, S):
        raise PreconditionError("S is not 2-covered in F")
    W = tau_witness(induced(F, S))
    if W is None:
        raise PreconditionError("tau(F[S]) < 2")
    core = S
    if target_s is not None:
        if target_s < 12 or target_s > len(S):
            raise PreconditionError("target size must satisfy 12 <= s <= |S|")
        base = sorted({v for e in W.edges for v in e})
        rest = [v for v in S if v not in base]
        core = tuple(sorted(base + rest[: target_s - len(base)]))
    edges = _cover_pairs(F, core, W.edges)
    Fp = Hypergraph(F.r, F.n, edges)
    ell = len(core)
    if not (is_two_covered(Fp, core) and len(Fp) < comb(ell, 2) and transversal_number(induced(Fp, core)) >= 2):
        raise InvariantViolation("reduction output fails the membership gates")
    return Fp, core


# ---------------------------------------------------------------------------
# membership


@dataclass
class MembershipResult:
    member: bool | None
    core: CoreWitness | None = None
    colorings: dict[int, HomMap] = field(default_factory=dict)
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "member": self.member,
            "reason": self.reason,
            "core": None if self.core is None else {"S": list(self.core.S), "ell": self.core.ell, "tau": self.core.tau},
            "colorings": {str(i): list(h.map) for i, h in self.colorings.items()},
        }


def in_Mt(F: Hypergraph, G_list: Sequence[Hypergraph], n_t: int, budget: int = DEFAULT_BUDGET) -> MembershipResult:
    core = None
    for S in iter_cores(F, n_t):
        ell = len(S)
        if ell < 4 or len(F) > comb(ell, 3):
            continue
        try:
            tau = transversal_number(induced(F, S), budget)
        except BudgetExceeded:
            return MembershipResult(None, reason="budget exhausted in transversal search")
        if tau >= 2:
            core = CoreWitness(S, ell, KIND_KHAT, tau)
            break
    if core is None:
        return MembershipResult(False, reason="no core of size <= n_t with the edge gate and tau >= 2")
    res = MembershipResult(True, core)
    for i, G in enumerate(G_list):
        try:
            h = find_homomorphism(F, G, budget)
        except BudgetExceeded:
            res.member = None
            res.reason = f"budget exhausted in colouring search against configuration {i}"
            return res
        if h is not None:
            res.colorings[i] = h
    if res.colorings:
        res.member = False
        res.reason = "colourable by " + ", ".join(map(str, sorted(res.colorings)))
    else:
        res.reason = "core found and no colouring exists"
    return res


@dataclass
class FreenessResult:
    free: bool | None
    witness: Hypergraph | None = None
    core: tuple[int, ...] | None = None
    coloring: tuple[int, HomMap] | None = None
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "free": self.free,
            "reason": self.reason,
            "core": None if self.core is None else list(self.core),
            "witness_edges": None if self.witness is None else [list(e) for e in self.witness.edges],
            "coloring": None if self.coloring is None else {"config": self.coloring[0], "map": list(self.coloring[1].map)},
        }


def _extend_map(partial: HomMap, F_vertices: set[int], H: Hypergraph, G: Hypergraph) -> list[int]:
    """Extend a colouring of F to V(H) greedily, breaking few edges of H."""
    phi = [partial.map[v] if v in F_vertices else -1 for v in range(H.n)]
    inc: list[list[tuple[int, ...]]] = [[] for _ in range(H.n)]
    for e in H.edges:
        for v in e:
            inc[v].append(e)
    for v in range(H.n):
        if phi[v] >= 0:
            continue
        best, best_bad = 0, None
        for a in range(G.n):
            phi[v] = a
            bad = 0
            for e in inc[v]:
                if all(phi[x] >= 0 for x in e):
                    img = tuple(sorted(phi[x] for x in e))
                    bad += len(set(img)) < len(img) or img not in G.edge_set
            if best_bad is None or bad < best_bad:
                best, best_bad = a, bad
        phi[v] = best
    return phi


def _search_member(H: Hypergraph, S: tuple[int, ...], G_list, limit: int, budget: int, counter: list[int]):
    """Smallest-first search for F within H with core S and at most ``limit`` edges.

    Every requirement is monotone under adding edges, so each node either
    satisfies all of them or branches on the edges that could repair the
    first violated one.  The search is complete.
    """
    Sset = set(S)
    HS = [e for e in H.edges if Sset.issuperset(e)]
    pair_edges = {p: [e for e in H.edges if p[0] in e and p[1] in e] for p in itertools.combinations(S, 2)}
    visited: set[frozenset] = set()

    def rec(F: frozenset):
        if F in visited:
            return None
        visited.add(F)
        counter[0] += 1
        if counter[0] > budget:
            raise BudgetExceeded("is_Mt_free", budget)
        covered = set()
        for e in F:
            covered.update(itertools.combinations(e, 2))
        missing = [p for p in pair_edges if p not in covered]
        if len(F) + -(-len(missing) // 3) > limit:
            return None
        branch = None
        if missing:
            p = min(missing, key=lambda p: len(pair_edges[p]))
            branch = pair_edges[p]
        else:
            FS = [e for e in F if Sset.issuperset(e)]
            if not FS:
                branch = HS
            else:
                hitters = [v for v in FS[0] if all(v in e for e in FS)]
                if hitters:
                    branch = min(([e for e in HS if v not in e] for v in hitters), key=len)
        if branch is None:
            Fh = Hypergraph(H.r, H.n, F)
            verts = {v for e in F for v in e}
            for G in G_list:
                h = find_homomorphism(Fh, G, budget)
                if h is None:
                    continue
                phi = _extend_map(h, verts, H, G)
                branch = []
                for e in H.edges:
                    img = tuple(sorted(phi[v] for v in e))
                    if len(set(img)) < len(img) or img not in G.edge_set:
                        branch.append(e)
                break
            if branch is None:
                return F
        if len(F) + 1 > limit:
            return None
        for e in branch:
            if e in F:
                continue
            got = rec(F | {e})
            if got is not None:
                return got
        return None

    return rec(frozenset())


def is_Mt_free(H: Hypergraph, G_list: Sequence[Hypergraph], n_t: int, budget: int = DEFAULT_BUDGET) -> FreenessResult:
    """Whether H contains no member of the family as a subgraph.

    By the hom-free equivalence this also decides whether some member maps
    homomorphically into H.  Returns ``free=None`` when the budget runs out.
    """
    try:
        for i, G in enumerate(G_list):
            h = find_homomorphism(H, G, budget)
            if h is not None:
                return FreenessResult(True, coloring=(i, h), reason=f"H is colourable by configuration {i}")
        counter = [0]
        for S in two_covered_sets(H, 4, n_t):
            HS = induced(H, S)
            if transversal_number(HS, budget) < 2:
                continue
            F = _search_member(H, S, G_list, comb(len(S), 3), budget, counter)
            if F is not None:
                W = Hypergraph(H.r, H.n, F)
                check = in_Mt(W, G_list, n_t, budget)
                if check.member is not True:
                    raise InvariantViolation("member found by the search fails the membership test")
                return FreenessResult(False, W, S, reason="found a member as a subgraph")
    except BudgetExceeded as exc:
        return FreenessResult(None, reason=str(exc))
    return FreenessResult(True, reason="no core admits a member within the edge limit")


# ---------------------------------------------------------------------------
# exhaustive oracle over small vertex sets


@lru_cache(maxsize=None)
def iso_class_masks(n: int) -> tuple[int, ...]:
    """Canonical edge masks of all 3-graphs on n labelled vertices up to isomorphism.

    Bit i of a mask marks the i-th triple in lexicographic order; the
    canonical mask is the minimum over all vertex permutations.
    """
    if n > 6:
        raise PreconditionError("isomorphism class enumeration is limited to n <= 6")
    triples = list(itertools.combinations(range(n), 3))
    m = len(triples)
    if m == 0:
        return (0,)
    idx = {t: i for i, t in enumerate(triples)}
    perms = list(itertools.permutations(range(n)))
    maps = np.array([[idx[tuple(sorted(p[v] for v in t))] for t in triples] for p in perms], dtype=np.int64)
    lo_bits = min(m, 10)
    hi_bits = m - lo_bits
    lo_sub = np.arange(1 << lo_bits, dtype=np.int64)
    hi_sub = np.arange(1 << hi_bits, dtype=np.int64)
    masks = np.arange(1 << m, dtype=np.int64)
    lo_part = masks & ((1 << lo_bits) - 1)
    hi_part = masks >> lo_bits
    canon = masks.copy()
    for row in maps:
        lo_tab = np.zeros(1 << lo_bits, dtype=np.int64)
        for b in range(lo_bits):
            lo_tab |= ((lo_sub >> b) & 1) << row[b]
        hi_tab = np.zeros(1 << hi_bits, dtype=np.int64)
        for b in range(hi_bits):
            hi_tab |= ((hi_sub >> b) & 1) << row[lo_bits + b]
        np.minimum(canon, lo_tab[lo_part] | hi_tab[hi_part], out=canon)
    return tuple(int(x) for x in np.unique(canon))


def mask_to_graph(n: int, mask: int) -> Hypergraph:
    triples = list(itertools.combinations(range(n), 3))
    return Hypergraph(3, n, (t for i, t in enumerate(triples) if mask >> i & 1))


def small_members(G_list: Sequence[Hypergraph], n_t: int, n: int = 6, budget: int = DEFAULT_BUDGET) -> list[Hypergraph]:
    """Members on at most n vertices, up to isomorphism, pruned to hom-minimal ones.

    A member is dropped when an already kept member maps into it, since any
    host receiving the larger one then also receives the smaller one.
    """
    members = []
    for mask in iso_class_masks(n):
        F = mask_to_graph(n, mask)
        res = in_Mt(F, G_list, n_t, budget)
        if res.member is None:
            raise BudgetExceeded("small_members", budget, "membership indeterminate")
        if res.member:
            members.append(F)
    members.sort(key=lambda F: (len(F), F.edges))
    kept: list[Hypergraph] = []
    for F in members:
        if not any(find_homomorphism(K, F, budget) is not None for K in kept):
            kept.append(F)
    return kept


def oracle_free(H: Hypergraph, members: Sequence[Hypergraph], budget: int = DEFAULT_BUDGET) -> bool:
    """True iff no listed member maps homomorphically into H."""
    return all(find_homomorphism(F, H, budget) is None for F in members)


@dataclass
class FuzzReport:
    samples: int
    discrepancies: list[dict]
    indeterminate: int
    members_used: int

    @property
    def ok(self) -> bool:
        return not self.discrepancies and not self.indeterminate


def hom_free_equiv_fuzz(samples: int, seed: int, G_list: Sequence[Hypergraph], n_t: int,
                        max_vertices: int = 6, budget: int = DEFAULT_BUDGET) -> FuzzReport:
    """Compare is_Mt_free with the member-homomorphism oracle on random small H."""
    members = small_members(G_list, n_t, max_vertices, budget)
    rng = np.random.default_rng(seed)
    bad, indet = [], 0
    for _ in range(samples):
        n = int(rng.integers(3, max_vertices + 1))
        p = float(rng.random())
        edges = [t for t in itertools.combinations(range(n), 3) if rng.random() < p]
        H = Hypergraph(3, n, edges)
        a = is_Mt_free(H, G_list, n_t, budget)
        if a.free is None:
            indet += 1
            continue
        b = oracle_free(H, members, budget)
        if a.free != b:
            bad.append({"n": n, "edges": [list(e) for e in H.edges], "search": a.free, "oracle": b})
    return FuzzReport(samples, bad, indet, len(members))


def exhaustive_equivalence(G_list: Sequence[Hypergraph], n_t: int, n: int = 6,
                           budget: int = DEFAULT_BUDGET) -> FuzzReport:
    """Run both freeness routes on every 3-graph on n vertices up to isomorphism."""
    members = small_members(G_list, n_t, n, budget)
    bad, indet = [], 0
    masks = iso_class_masks(n)
    for mask in masks:
        H = mask_to_graph(n, mask)
        a = is_Mt_free(H, G_list, n_t, budget)
        if a.free is None:
            indet += 1
            continue
        if a.free != oracle_free(H, members, budget):
            bad.append({"mask": mask, "search": a.free})
    return FuzzReport(len(masks), bad, indet, len(members))

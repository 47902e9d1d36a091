"""Pairwise balanced designs, their triple expansions, regular 3-graphs and packings.

Constructors, tried in order by :func:`build_design`:

* k = 2: every pair is a block.
* k = 3: Bose (n = 3 mod 6) and Skolem (n = 1 mod 6) Steiner triple systems.
* k = 4: verified tables for n = 13 and n = 16.
* projective planes PG(2, q), affine planes AG(2, q) and Hermitian unitals of
  order q, for prime q.
* otherwise an exact-cover search with a node budget.

Every returned design is re-verified by a full pair-coverage scan.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .errors import BudgetExceeded, DesignError, InvalidSize, InvariantViolation, PreconditionError
from .hcore import Hypergraph

# 1/e > this value; used to decide the packing condition without floats
INV_E_LOWER = Fraction(367879441, 10 ** 9)

TABLE_13_4 = (
    (0, 1, 3, 9), (0, 2, 8, 12), (0, 4, 5, 7), (0, 6, 10, 11), (1, 2, 4, 10),
    (1, 5, 6, 8), (1, 7, 11, 12), (2, 3, 5, 11), (2, 6, 7, 9), (3, 4, 6, 12),
    (3, 7, 8, 10), (4, 8, 9, 11), (5, 9, 10, 12),
)

TABLE_16_4 = (
    (0, 1, 2, 3), (0, 4, 8, 12), (0, 5, 10, 15), (0, 6, 11, 13), (0, 7, 9, 14),
    (1, 4, 11, 14), (1, 5, 9, 13), (1, 6, 8, 15), (1, 7, 10, 12), (2, 4, 9, 15),
    (2, 5, 11, 12), (2, 6, 10, 14), (2, 7, 8, 13), (3, 4, 10, 13), (3, 5, 8, 14),
    (3, 6, 9, 12), (3, 7, 11, 15), (4, 5, 6, 7), (8, 9, 10, 11), (12, 13, 14, 15),
)


@dataclass(frozen=True)
class Design:
    n: int
    k: int
    blocks: Hypergraph
    method: str = ""

    def __post_init__(self):
        if self.blocks.r != self.k or self.blocks.n != self.n:
            raise InvariantViolation("block hypergraph does not match (n, k)")

    def verify(self) -> bool:
        return pair_coverage_ok(self.n, self.blocks.edges)


def pair_coverage_ok(n: int, blocks) -> bool:
    """True iff every pair of [n] lies in exactly one block."""
    cover = np.zeros((n, n), dtype=np.int64)
    for b in blocks:
        idx = np.array(b)
        cover[np.ix_(idx, idx)] += 1
    np.fill_diagonal(cover, 1)
    return bool(np.all(cover == 1))


def admissible(n: int, k: int) -> bool:
    return n >= k and (n - 1) % (k - 1) == 0 and (n * (n - 1)) % (k * (k - 1)) == 0


def _is_prime(q: int) -> bool:
    return q >= 2 and all(q % p for p in range(2, int(q ** 0.5) + 1))


# ---------------------------------------------------------------------------
# Steiner triple systems


def bose_sts(n: int) -> list[tuple[int, ...]]:
    if n % 6 != 3:
        raise DesignError("Bose construction needs n = 3 mod 6")
    m = n // 3
    half = (m + 1) // 2

    def op(x: int, y: int) -> int:
        return (x + y) * half % m

    def pt(x: int, i: int) -> int:
        return x + (i % 3) * m

    blocks = [(pt(x, 0), pt(x, 1), pt(x, 2)) for x in range(m)]
    for i in range(3):
        for x, y in itertools.combinations(range(m), 2):
            blocks.append((pt(x, i), pt(y, i), pt(op(x, y), i + 1)))
    return blocks


def skolem_sts(n: int) -> list[tuple[int, ...]]:
    if n % 6 != 1 or n < 7:
        raise DesignError("Skolem construction needs n = 1 mod 6, n >= 7")
    v = (n - 1) // 6
    m = 2 * v
    inf = n - 1

    def op(x: int, y: int) -> int:
        s = (x + y) % m
        return s // 2 if s % 2 == 0 else (s - 1) // 2 + v

    def pt(x: int, i: int) -> int:
        return x + (i % 3) * m

    blocks = [(pt(x, 0), pt(x, 1), pt(x, 2)) for x in range(v)]
    for x in range(v):
        for i in range(3):
            blocks.append((inf, pt(x + v, i), pt(x, i + 1)))
    for i in range(3):
        for x, y in itertools.combinations(range(m), 2):
            blocks.append((pt(x, i), pt(y, i), pt(op(x, y), i + 1)))
    return blocks


# ---------------------------------------------------------------------------
# geometries over prime fields


def _proj_points(q: int, dim: int = 3) -> list[tuple[int, ...]]:
    """Normalized representatives (first nonzero entry 1) of F_q^dim."""
    pts = []
    for v in itertools.product(range(q), repeat=dim):
        nz = [c for c in v if c]
        if nz and nz[0] == 1:
            pts.append(v)
    return pts


def projective_plane(q: int) -> list[tuple[int, ...]]:
    if not _is_prime(q):
        raise DesignError("projective planes are built for prime orders only")
    pts = _proj_points(q)
    index = {p: i for i, p in enumerate(pts)}
    blocks = []
    for line in pts:
        blocks.append(tuple(index[p] for p in pts if sum(a * b for a, b in zip(line, p)) % q == 0))
    return blocks


def affine_plane(q: int) -> list[tuple[int, ...]]:
    if not _is_prime(q):
        raise DesignError("affine planes are built for prime orders only")
    blocks = [tuple(c * q + y for y in range(q)) for c in range(q)]
    for m in range(q):
        for b in range(q):
            blocks.append(tuple(x * q + (m * x + b) % q for x in range(q)))
    return blocks


class _GFq2:
    """Arithmetic in GF(q^2) = F_q[i]/(i^2 - d) with d a non-residue; elements a + b*q."""

    def __init__(self, q: int):
        squares = {x * x % q for x in range(1, q)}
        self.d = next(c for c in range(2, q) if c not in squares) if q > 2 else None
        if self.d is None:
            raise DesignError("unitals are built for odd prime q")
        self.q = q
        Q = q * q
        self.size = Q
        self.add = [[0] * Q for _ in range(Q)]
        self.mul = [[0] * Q for _ in range(Q)]
        for u in range(Q):
            a, b = divmod(u, q)
            for w in range(Q):
                c, e = divmod(w, q)
                self.add[u][w] = ((a + c) % q) * q + (b + e) % q
                self.mul[u][w] = ((a * c + self.d * b * e) % q) * q + (a * e + b * c) % q
        self.inv = [0] * Q
        for u in range(1, Q):
            self.inv[u] = next(w for w in range(1, Q) if self.mul[u][w] == 1)
        self.neg = [next(w for w in range(Q) if self.add[u][w] == 0) for u in range(Q)]

    def power(self, u: int, e: int) -> int:
        r = 1
        for _ in range(e):
            r = self.mul[r][u]
        return r


def hermitian_unital(q: int) -> list[tuple[int, ...]]:
    """Unital design (q^3 + 1, q + 1) from the Hermitian curve in PG(2, q^2)."""
    if not _is_prime(q) or q == 2:
        raise DesignError("unitals are built for odd prime q")
    F = _GFq2(q)
    Q = F.size
    norm = [F.power(u, q + 1) for u in range(Q)]
    pts = []
    for v in itertools.product(range(Q), repeat=3):
        nz = [c for c in v if c]
        if not nz or nz[0] != 1:
            continue
        s = F.add[F.add[norm[v[0]]][norm[v[1]]]][norm[v[2]]]
        if s == 0:
            pts.append(v)
    if len(pts) != q ** 3 + 1:
        raise InvariantViolation(f"expected {q ** 3 + 1} curve points, found {len(pts)}")
    mul, add, neg = F.mul, F.add, F.neg

    def cross(a, b):
        return (
            add[mul[a[1]][b[2]]][neg[mul[a[2]][b[1]]]],
            add[mul[a[2]][b[0]]][neg[mul[a[0]][b[2]]]],
            add[mul[a[0]][b[1]]][neg[mul[a[1]][b[0]]]],
        )

    def normalize(v):
        lead = next(c for c in v if c)
        inv = F.inv[lead]
        return tuple(mul[c][inv] for c in v)

    lines: dict[tuple[int, ...], set[int]] = {}
    for i, j in itertools.combinations(range(len(pts)), 2):
        key = normalize(cross(pts[i], pts[j]))
        lines.setdefault(key, set()).update((i, j))
    return [tuple(sorted(b)) for b in lines.values()]


# ---------------------------------------------------------------------------
# exact cover fallback


def exact_cover_design(n: int, k: int, budget: int = 1_000_000) -> list[tuple[int, ...]]:
    """Search for an (n, k)-design as an exact cover of pairs by k-sets."""
    items = {p: set() for p in itertools.combinations(range(n), 2)}
    options = {}
    for idx, blk in enumerate(itertools.combinations(range(n), k)):
        pairs = list(itertools.combinations(blk, 2))
        options[idx] = (blk, pairs)
        for p in pairs:
            items[p].add(idx)
    solution: list[int] = []
    nodes = 0

    def select(idx):
        removed = []
        for p in options[idx][1]:
            for other in items[p]:
                for p2 in options[other][1]:
                    if p2 != p:
                        items[p2].discard(other)
            removed.append((p, items.pop(p)))
        return removed

    def deselect(idx, removed):
        for p, opts in reversed(removed):
            items[p] = opts
            for other in opts:
                for p2 in options[other][1]:
                    if p2 != p:
                        items[p2].add(other)

    def search() -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded("exact_cover_design", budget, f"(n, k) = ({n}, {k})")
        if not items:
            return True
        p = min(items, key=lambda c: len(items[c]))
        for idx in sorted(items[p]):
            solution.append(idx)
            removed = select(idx)
            if search():
                return True
            deselect(idx, removed)
            solution.pop()
        return False

    if not search():
        raise DesignError(f"no ({n}, {k})-design exists")
    return [options[i][0] for i in solution]


# ---------------------------------------------------------------------------
# public builders


def build_design(n: int, k: int, budget: int = 1_000_000) -> Design:
    if k < 2 or n < k:
        raise DesignError(f"need 2 <= k <= n, got n={n}, k={k}")
    if not admissible(n, k):
        raise DesignError(f"({n}, {k}) fails (k-1) | (n-1) or k(k-1) | n(n-1)")
    method, blocks = _construct(n, k, budget)
    D = Design(n, k, Hypergraph(k, n, blocks), method)
    if len(D.blocks) != comb(n, 2) // comb(k, 2) or not D.verify():
        raise InvariantViolation(f"{method} produced an invalid ({n}, {k})-design")
    return D


def _construct(n: int, k: int, budget: int):
    if k == 2:
        return "pairs", list(itertools.combinations(range(n), 2))
    if n == k:
        return "single-block", [tuple(range(n))]
    if k == 3 and n % 6 == 3:
        return "bose", bose_sts(n)
    if k == 3 and n % 6 == 1:
        return "skolem", skolem_sts(n)
    if (n, k) == (13, 4):
        return "table", list(TABLE_13_4)
    if (n, k) == (16, 4):
        return "table", list(TABLE_16_4)
    q = k - 1
    if n == q * q + q + 1 and _is_prime(q):
        return "projective-plane", projective_plane(q)
    if n == k * k and _is_prime(k):
        return "affine-plane", affine_plane(k)
    if n == q ** 3 + 1 and _is_prime(q) and q > 2:
        return "hermitian-unital", hermitian_unital(q)
    return "exact-cover", exact_cover_design(n, k, budget)


def expand_H(D: Design) -> Hypergraph:
    """All triples lying inside some block."""
    if D.k < 2:
        raise PreconditionError("need k >= 2")
    triples = set()
    for b in D.blocks.edges:
        triples.update(itertools.combinations(b, 3))
    H = Hypergraph(3, D.n, triples)
    if 6 * len(H) != (D.k - 2) * D.n * (D.n - 1):
        raise InvariantViolation("triple count differs from (k-2)n(n-1)/6")
    return H


# ---------------------------------------------------------------------------
# regular 3-graphs


def _lattice_round(m: int, c: int, d: int) -> list[tuple[int, int, int]]:
    return [tuple(sorted((a, (a + c) % m + m, (a + d) % m + 2 * m))) for a in range(m)]


def _random_matching(n: int, used: set, rng: np.random.Generator, budget: int) -> list[tuple[int, ...]]:
    """A perfect triple matching avoiding ``used``, by random start plus swap repair."""
    perm = list(rng.permutation(n))
    for _ in range(budget):
        triples = [tuple(sorted(perm[i:i + 3])) for i in range(0, n, 3)]
        bad = [t for t, e in enumerate(triples) if e in used]
        if not bad:
            return triples
        t = bad[int(rng.integers(len(bad)))]
        i = 3 * t + int(rng.integers(3))
        j = int(rng.integers(n))
        perm[i], perm[j] = perm[j], perm[i]
    raise BudgetExceeded("build_regular_3graph", budget, "swap repair did not clear conflicts")


def build_regular_3graph(n: int, s: int, seed: int = 0, budget: int = 200_000) -> Hypergraph:
    """An s-regular 3-graph on [n] as a union of s edge-disjoint parallel classes.

    Vertices are read as (a, b) with a in Z_m, b in Z_3 (m = n/3).  The m^2
    classes {(a,0), (a+c,1), (a+d,2)} are pairwise edge-disjoint; the seed
    picks which ones to use.  Beyond m^2 classes, further classes come from a
    random start with swap repair.
    """
    if s < 0 or s > comb(n - 1, 2):
        raise PreconditionError(f"s must lie in 0..C(n-1,2) = {comb(n - 1, 2)}")
    if s == 0:
        return Hypergraph(3, n)
    if n % 3:
        raise PreconditionError("n must be divisible by 3")
    m = n // 3
    rng = np.random.default_rng(seed)
    lattice = [(c, d) for c in range(m) for d in range(m)]
    order = rng.permutation(len(lattice))
    edges: set[tuple[int, ...]] = set()
    for idx in order[:s]:
        edges.update(_lattice_round(m, *lattice[idx]))
    for _ in range(s - len(lattice)):
        edges.update(_random_matching(n, edges, rng, budget))
    H = Hypergraph(3, n, edges)
    if set(H.degrees) != {s}:
        raise InvariantViolation("regular 3-graph builder produced a non-regular graph")
    return H


# ---------------------------------------------------------------------------
# packings


def lu_szekely_condition(H1: Hypergraph, H2: Hypergraph) -> bool:
    """Certified check of D(H1)|H2| + D(H2)|H1| < C(n, r) / (e r)."""
    if H1.n != H2.n or H1.r != H2.r:
        raise InvalidSize("packing needs equal n and r")
    d1 = max(H1.degrees, default=0)
    d2 = max(H2.degrees, default=0)
    lhs = d1 * len(H2) + d2 * len(H1)
    return lhs < INV_E_LOWER * comb(H1.n, H1.r) / H1.r


@dataclass(frozen=True)
class PackingWitness:
    phi: tuple[int, ...]
    verified: bool
    conflicts: int
    condition_held: bool
    attempts: int

    def apply(self, H: Hypergraph) -> Hypergraph:
        return Hypergraph(H.r, H.n, (tuple(self.phi[v] for v in e) for e in H.edges))


def _conflicts(edges, phi, forbidden) -> int:
    return sum(tuple(sorted(phi[v] for v in e)) in forbidden for e in edges)


def pack(S_prime: Hypergraph, target_forbidden: Hypergraph, seed: int = 0, budget: int = 200_000,
         restarts: int = 20) -> PackingWitness:
    """Find a permutation phi with phi(S') disjoint from the forbidden edges.

    The identity is tried first, then seeded random permutations improved by
    2-swaps that never increase the conflict count.  ``budget`` bounds the
    total number of swap attempts.
    """
    if S_prime.n != target_forbidden.n or S_prime.r != target_forbidden.r:
        raise InvalidSize("packing needs equal n and r")
    n = S_prime.n
    cond = lu_szekely_condition(S_prime, target_forbidden)
    forb = target_forbidden.edge_set
    inc: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
    for e in S_prime.edges:
        for v in e:
            inc[v].append(e)
    phi = list(range(n))
    conf = _conflicts(S_prime.edges, phi, forb)
    rng = np.random.default_rng(seed)
    attempts = 0
    best = (conf, tuple(phi))
    for restart in range(restarts + 1):
        if restart:
            phi = [int(v) for v in rng.permutation(n)]
            conf = _conflicts(S_prime.edges, phi, forb)
        since_refresh = 64
        while conf and attempts < budget:
            attempts += 1
            if since_refresh >= 64:
                bad = [e for e in S_prime.edges if tuple(sorted(phi[v] for v in e)) in forb]
                since_refresh = 0
            since_refresh += 1
            e = bad[int(rng.integers(len(bad)))]
            u = e[int(rng.integers(len(e)))]
            w = int(rng.integers(n))
            if w == u:
                continue
            touched = set(inc[u]) | set(inc[w])
            before = _conflicts(touched, phi, forb)
            phi[u], phi[w] = phi[w], phi[u]
            after = _conflicts(touched, phi, forb)
            if after <= before:
                conf += after - before
            else:
                phi[u], phi[w] = phi[w], phi[u]
        if conf < best[0]:
            best = (conf, tuple(phi))
        if conf == 0 or attempts >= budget:
            break
    conf, phi_t = best
    if conf:
        raise BudgetExceeded("pack", budget, f"{conf} conflicts remain")
    image = Hypergraph(S_prime.r, n, (tuple(phi_t[v] for v in e) for e in S_prime.edges))
    if image.edge_set & forb:
        raise InvariantViolation("packing witness failed re-verification")
    return PackingWitness(phi_t, True, 0, cond, attempts)

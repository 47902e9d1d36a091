"""Zykov symmetrization, the maximum colourable size and low-degree stripping."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, InvariantViolation, PreconditionError
from .family import HomMap, find_homomorphism, is_Mt_free
from .hcore import (
    DEFAULT_BUDGET,
    Hypergraph,
    VertexPartition,
    Z_eps,
    blow_up_edge_count,
    check_semibipartition,
    equivalence_classes,
    induced,
    psi,
    remove_vertices,
    transversal_number,
)

# ---------------------------------------------------------------------------
# class pairs


def _cross_covered(H: Hypergraph, C1: Sequence[int], C2: Sequence[int]) -> list[bool]:
    cd = H.pair_codegrees
    return [(min(u, v), max(u, v)) in cd for u in C1 for v in C2]


def find_missing_class_pair(H: Hypergraph) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """First pair of equivalence classes with no shadow pair between them.

    Classes are ordered by smallest vertex and pairs are scanned in
    lexicographic order.  Identical links make the cross pairs all-or-nothing;
    that is checked on every pair of classes.
    """
    classes = equivalence_classes(H).blocks
    found = None
    for C1, C2 in itertools.combinations(classes, 2):
        cov = _cross_covered(H, C1, C2)
        if any(cov) and not all(cov):
            raise InvariantViolation(f"classes {C1} and {C2} are partially joined in the shadow")
        if not any(cov) and found is None:
            found = (C1, C2)
    return found


def _class_degree(H: Hypergraph, C: Sequence[int]) -> int:
    return H.degrees[C[0]]


def orient(H: Hypergraph, C1: Sequence[int], C2: Sequence[int]):
    """Return the pair as (lower, higher) under the order (degree, size); ties keep the input order."""
    k1 = (_class_degree(H, C1), len(C1))
    k2 = (_class_degree(H, C2), len(C2))
    return (tuple(C1), tuple(C2)) if k1 <= k2 else (tuple(C2), tuple(C1))


def _check_classes(H: Hypergraph, C1, C2) -> None:
    blocks = set(equivalence_classes(H).blocks)
    if tuple(sorted(C1)) not in blocks or tuple(sorted(C2)) not in blocks:
        raise PreconditionError("C1 and C2 must be equivalence classes")
    if any(_cross_covered(H, C1, C2)):
        raise PreconditionError("the classes are joined in the shadow")


def _replace_links(H: Hypergraph, targets: Sequence[int], source: int) -> Hypergraph:
    tset = set(targets)
    kept = [e for e in H.edges if not tset.intersection(e)]
    for v in targets:
        kept.extend((v,) + A for A in H.links[source])
    return Hypergraph(H.r, H.n, kept)


def symmetrization_map(n: int, moved: Sequence[int], target: int) -> HomMap:
    """The map H' -> H sending every moved vertex onto ``target``."""
    m = list(range(n))
    for v in moved:
        m[v] = target
    return HomMap(tuple(m))


def symmetrize_class(H: Hypergraph, C1: Sequence[int], C2: Sequence[int]) -> Hypergraph:
    """Give every vertex of C1 the link of C2."""
    C1, C2 = tuple(sorted(C1)), tuple(sorted(C2))
    _check_classes(H, C1, C2)
    d1, d2 = _class_degree(H, C1), _class_degree(H, C2)
    if d1 > d2:
        raise PreconditionError("orient the pair so that d(C1) <= d(C2)")
    Hp = _replace_links(H, C1, C2[0])
    if len(Hp) != len(H) + len(C1) * (d2 - d1):
        raise InvariantViolation("edge count identity failed after class symmetrization")
    if not symmetrization_map(H.n, C1, C2[0]).verify(Hp, H):
        raise InvariantViolation("class symmetrization output does not map into the input")
    return Hp


def symmetrize_vertex(H: Hypergraph, v1: int, v2: int) -> Hypergraph:
    """Give v1 the link of v2; v1 and v2 lie in distinct classes with no shadow pair between."""
    part = equivalence_classes(H)
    C1 = part.blocks[part.block_of[v1]]
    C2 = part.blocks[part.block_of[v2]]
    if C1 == C2:
        raise PreconditionError("v1 and v2 lie in the same class")
    if any(_cross_covered(H, C1, C2)):
        raise PreconditionError("the classes of v1 and v2 are joined in the shadow")
    d1, d2 = H.degrees[v1], H.degrees[v2]
    if (d1, len(C1)) > (d2, len(C2)):
        raise PreconditionError("orient the pair so that (d(C1), |C1|) <= (d(C2), |C2|)")
    Hp = _replace_links(H, [v1], v2)
    if d1 < d2:
        if len(Hp) <= len(H):
            raise InvariantViolation("vertex symmetrization did not increase the edge count")
    else:
        gain = psi(Hp) - psi(H)
        if len(Hp) != len(H) or gain < 2 * (len(C2) - len(C1) + 1):
            raise InvariantViolation(f"Psi gain {gain} below 2(|C2| - |C1| + 1)")
    if not symmetrization_map(H.n, [v1], v2).verify(Hp, H):
        raise InvariantViolation("vertex symmetrization output does not map into the input")
    return Hp


# ---------------------------------------------------------------------------
# the engine


@dataclass
class SymmetrizationStep:
    edges: int
    psi: int
    action: str
    moved: tuple[int, ...] = ()
    target: int = -1


@dataclass
class SymmetrizationTrace:
    steps: list[SymmetrizationStep] = field(default_factory=list)
    outcome: str = ""
    final: Hypergraph | None = None
    certificate: dict = field(default_factory=dict)
    graphs: list[Hypergraph] = field(default_factory=list)

    def is_strictly_increasing(self) -> bool:
        keys = [(s.edges, s.psi) for s in self.steps]
        return all(a < b for a, b in zip(keys, keys[1:]))

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "steps": [{"edges": s.edges, "psi": s.psi, "action": s.action,
                       "moved": list(s.moved), "target": s.target} for s in self.steps],
            "certificate": self.certificate,
            "final_edges": None if self.final is None else [list(e) for e in self.final.edges],
        }


def _freeness_due(step: int, n: int) -> bool:
    return n <= 12 or step % 10 == 0


def run_symmetrization(H: Hypergraph, G_list: Sequence[Hypergraph] | None = None, n_t: int | None = None,
                       mode: str = "vertex", budget: int = DEFAULT_BUDGET, max_steps: int | None = None,
                       keep_graphs: bool = False) -> SymmetrizationTrace:
    """Symmetrize until no two classes are missing from each other, then certify.

    With a family, freeness is re-checked along the way (every step for
    n <= 12, every tenth step above).  Outcomes: ``semibipartite``,
    ``colorable(i)``, ``not-free-detected``, ``budget``, ``uncertified``
    (no colouring and the transversal is larger than n_t) and ``terminal``
    (no family given and the terminal graph is not semibipartite).
    """
    if mode not in ("vertex", "class"):
        raise PreconditionError("mode must be 'vertex' or 'class'")
    if G_list is not None and n_t is None:
        raise PreconditionError("n_t is required together with G_list")
    n = H.n
    limit = max_steps if max_steps is not None else comb(n, 3) * n * n + 1
    tr = SymmetrizationTrace()
    tr.steps.append(SymmetrizationStep(len(H), psi(H), "start"))
    if keep_graphs:
        tr.graphs.append(H)
    step = 0
    while True:
        if G_list is not None and _freeness_due(step, n):
            res = is_Mt_free(H, G_list, n_t, budget)
            if res.free is None:
                tr.outcome, tr.final = "budget", H
                return tr
            if not res.free:
                tr.outcome, tr.final = "not-free-detected", H
                tr.certificate = res.to_json()
                return tr
        pair = find_missing_class_pair(H)
        if pair is None:
            break
        if step >= limit:
            tr.outcome, tr.final = "budget", H
            return tr
        C1, C2 = orient(H, *pair)
        if mode == "class":
            Hn = symmetrize_class(H, C1, C2)
            moved, target, action = C1, C2[0], "class"
        else:
            Hn = symmetrize_vertex(H, C1[0], C2[0])
            moved, target, action = (C1[0],), C2[0], "vertex"
        st = SymmetrizationStep(len(Hn), psi(Hn), action, tuple(moved), target)
        prev = tr.steps[-1]
        if (st.edges, st.psi) <= (prev.edges, prev.psi):
            raise InvariantViolation("trace is not lexicographically increasing")
        tr.steps.append(st)
        if keep_graphs:
            tr.graphs.append(Hn)
        H = Hn
        step += 1
    tr.final = H
    _certify(tr, H, G_list, n_t, budget)
    return tr


def _certify(tr: SymmetrizationTrace, H: Hypergraph, G_list, n_t, budget) -> None:
    part = equivalence_classes(H)
    reps = [b[0] for b in part.blocks]
    T = induced(H, reps)
    tau = transversal_number(T, budget)
    tr.certificate = {"classes": [list(b) for b in part.blocks], "transversal_tau": tau}
    if tau < 2:
        centre = next((v for v in reps if all(v in e for e in T.edges)), None) if T.edges else None
        A = part.blocks[part.block_of[centre]] if centre is not None else ()
        if not check_semibipartition(H, A):
            raise InvariantViolation("terminal graph with a star transversal is not semibipartite")
        tr.outcome = "semibipartite"
        tr.certificate["A"] = list(A)
        return
    if G_list is None:
        tr.outcome = "terminal"
        return
    try:
        for i, G in enumerate(G_list):
            h = find_homomorphism(T, G, budget)
            if h is None:
                continue
            lifted = HomMap(tuple(h.map[part.blocks[part.block_of[v]][0]] for v in range(H.n)))
            if not lifted.verify(H, G):
                raise InvariantViolation("lifted colouring fails on the terminal graph")
            tr.outcome = f"colorable({i})"
            tr.certificate["coloring"] = {"config": i, "map": list(lifted.map)}
            return
    except BudgetExceeded:
        tr.outcome = "budget"
        return
    tr.outcome = "not-free-detected" if len(reps) <= n_t else "uncertified"


# ---------------------------------------------------------------------------
# maximum colourable size


def _weak_compositions(n: int, m: int):
    for bars in itertools.combinations(range(n + m - 1), m - 1):
        prev = -1
        parts = []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(n + m - 2 - prev)
        yield parts


@dataclass(frozen=True)
class MfrakResult:
    value: int
    config: int
    sizes: tuple[int, ...]
    exact: bool


def _hill_climb(G: Hypergraph, n: int) -> tuple[int, list[int]]:
    m = G.n
    sizes = [n // m + (1 if j < n % m else 0) for j in range(m)]
    best = blow_up_edge_count(G, sizes)
    improved = True
    while improved:
        improved = False
        for a, b in itertools.permutations(range(m), 2):
            if sizes[a] == 0:
                continue
            sizes[a] -= 1
            sizes[b] += 1
            val = blow_up_edge_count(G, sizes)
            if val > best:
                best, improved = val, True
                break
            sizes[a] += 1
            sizes[b] -= 1
    return best, sizes


def max_colorable_edges(G_list: Sequence[Hypergraph], n: int, budget: int = 2_000_000) -> MfrakResult:
    """Largest blow-up of some configuration on n vertices.

    Exact over all weak compositions when there are at most ``budget`` of
    them, otherwise a +-1 hill climb from the balanced point (``exact`` False).
    """
    if not G_list:
        raise PreconditionError("need at least one configuration")
    best = None
    exact = True
    for i, G in enumerate(G_list):
        m = G.n
        if comb(n + m - 1, m - 1) <= budget:
            E = np.array(G.edges, dtype=np.int64).reshape(len(G), G.r)
            for parts in _weak_compositions(n, m):
                val = int(np.prod(np.array(parts, dtype=np.int64)[E], axis=1).sum()) if len(G) else 0
                if best is None or val > best.value:
                    best = MfrakResult(val, i, tuple(parts), True)
        else:
            exact = False
            val, sizes = _hill_climb(G, n)
            if best is None or val > best.value:
                best = MfrakResult(val, i, tuple(sizes), False)
    return MfrakResult(best.value, best.config, best.sizes, exact)


def semibipartite_max(n: int) -> int:
    if n < 1:
        raise PreconditionError("n must be positive")
    val = max(a * comb(n - a, 2) for a in range(n + 1))
    if 27 * val > 2 * n ** 3:
        raise InvariantViolation("semibipartite maximum exceeds 2n^3/27")
    return val


# ---------------------------------------------------------------------------
# transversal sampling and stripping


@dataclass
class TransversalResult:
    selection: dict[int, int] | None
    tries: int
    gates: dict[str, bool]


def sample_transversal(H: Hypergraph, G: Hypergraph, partition: VertexPartition, S: Sequence[int],
                       T: Sequence[int], eta, seed: int = 0, tries: int = 100) -> TransversalResult:
    """Pick u_j in V_j (j in T) so that the blow-up pattern on U and on S-links survives in H.

    The three size hypotheses are evaluated exactly and reported; sampling
    runs whether or not they hold.
    """
    if len(partition) != G.n:
        raise PreconditionError("partition must have one block per vertex of G")
    eta = Fraction(eta)
    n = H.n
    T = list(T)
    S = list(S)
    Tset = set(T)
    if any(partition.block_of.get(v) in Tset for v in S):
        raise PreconditionError("S must avoid the blocks indexed by T")
    V = partition.blocks
    Gset = G.edge_set
    Hset = H.edge_set

    def cross(js, edges) -> int:
        return sum(1 for e in edges if sorted(partition.block_of.get(v, -1) for v in e) == sorted(js))

    gates = {}
    gates["a"] = all(Fraction(len(V[j]), (len(S) + 1) * len(T) * n) ** 3 >= eta for j in T) if T else True
    gb = True
    for js in itertools.combinations(sorted(T), 3):
        full = len(V[js[0]]) * len(V[js[1]]) * len(V[js[2]]) if js in Gset else 0
        gb &= cross(js, H.edges) >= full - eta * n ** 3
    gates["b"] = gb
    gc = True
    for v in S:
        jv = partition.block_of[v]
        link = H.links[v]
        for js in itertools.combinations(sorted(T), 2):
            full = len(V[js[0]]) * len(V[js[1]]) if tuple(sorted((jv,) + js)) in Gset else 0
            gc &= cross(js, link) >= full - eta * n * n
    gates["c"] = gc

    rng = np.random.default_rng(seed)
    triples = [js for js in itertools.combinations(sorted(T), 3) if js in Gset]
    for attempt in range(1, tries + 1):
        pick = {j: V[j][int(rng.integers(len(V[j])))] for j in T}
        ok = all(tuple(sorted(pick[j] for j in js)) in Hset for js in triples)
        if ok:
            for v in S:
                jv = partition.block_of[v]
                for js in itertools.combinations(sorted(T), 2):
                    if tuple(sorted((jv,) + js)) in Gset and tuple(sorted((v, pick[js[0]], pick[js[1]]))) not in Hset:
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            return TransversalResult(pick, attempt, gates)
    return TransversalResult(None, tries, gates)


def strip_and_color(H: Hypergraph, lam, eps, G_list: Sequence[Hypergraph], budget: int = DEFAULT_BUDGET) -> dict:
    """Remove low-degree vertices and try to colour what is left."""
    lam, eps = Fraction(lam), Fraction(eps)
    n = H.n
    Z = Z_eps(H, lam, eps)
    gate = len(H) >= (lam - eps) * n ** 3
    rep: dict = {"Z": Z, "edge_gate": gate}
    if gate:
        rep["Z_size_bound"] = "pass" if len(Z) ** 2 <= eps * n * n else "fail"
    else:
        rep["Z_size_bound"] = "hypothesis-not-met"
    Hs, keep = remove_vertices(H, Z)
    rep["stripped_vertices"] = Hs.n
    rep["stripped_edges"] = len(Hs)
    mindeg = min(Hs.degrees, default=0)
    rep["stripped_min_degree"] = mindeg
    rep["min_degree_bound"] = _min_degree_ok(mindeg, lam, eps, n)
    rep["colorable"] = None
    try:
        for i, G in enumerate(G_list):
            h = find_homomorphism(Hs, G, budget)
            if h is not None:
                rep["colorable"] = i
                rep["coloring"] = {keep[v]: h.map[v] for v in range(Hs.n)}
                break
        else:
            rep["colorable"] = False
    except BudgetExceeded:
        rep["colorable"] = None
    return rep


def _min_degree_ok(d: int, lam: Fraction, eps: Fraction, n: int) -> bool:
    """d >= (3 lam - 3 sqrt(eps)) n^2, i.e. 3 lam n^2 - d <= 3 sqrt(eps) n^2."""
    gap = 3 * lam * n * n - d
    if gap <= 0:
        return True
    return gap * gap <= 9 * eps * n ** 4

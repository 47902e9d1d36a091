import itertools
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypext.errors import PreconditionError
from hypext.family import find_homomorphism
from hypext.forge import assemble_Gi, lambda_t
from hypext.hcore import (
    Hypergraph, VertexPartition, blow_up, check_semibipartition, complete, equivalence_classes, fano, psi, star,
)
from hypext.symm import (
    find_missing_class_pair, max_colorable_edges, orient, run_symmetrization, sample_transversal,
    semibipartite_max, strip_and_color, symmetrize_class, symmetrize_vertex,
)

from conftest import hypergraphs

EDGE = Hypergraph(3, 3, [(0, 1, 2)])
TWO = Hypergraph(3, 6, [(0, 1, 2), (3, 4, 5)])
FAMILY = [complete(4), fano()]


def test_missing_pair_examples(K4):
    assert find_missing_class_pair(blow_up(EDGE, [2, 2, 2])[0]) is None
    assert find_missing_class_pair(K4) is None
    # every vertex of two disjoint edges has its own link, so the classes are singletons
    C1, C2 = find_missing_class_pair(TWO)
    assert (C1, C2) == ((0,), (3,))
    assert not any(tuple(sorted((u, v))) in TWO.pair_codegrees for u in C1 for v in C2)


def test_class_equal_links():
    H = Hypergraph(3, 6, [(0, 2, 3), (1, 4, 5)])
    C1, C2 = orient(H, *find_missing_class_pair(H))
    Hp = symmetrize_class(H, C1, C2)
    d1, d2 = H.degrees[C1[0]], H.degrees[C2[0]]
    assert len(Hp) == len(H) + len(C1) * (d2 - d1)


def test_class_two_disjoint_edges():
    C1, C2 = orient(TWO, *find_missing_class_pair(TWO))
    Hp = symmetrize_class(TWO, C1, C2)
    assert len(Hp) == len(TWO) + len(C1) * (TWO.degrees[C2[0]] - TWO.degrees[C1[0]])


UNEVEN = Hypergraph(3, 7, [(0, 1, 2), (3, 4, 5), (3, 4, 6)])


def test_class_strict_increase():
    assert UNEVEN.degrees[0] < UNEVEN.degrees[3]
    Hp = symmetrize_class(UNEVEN, (0,), (3,))
    assert len(Hp) == len(UNEVEN) + 1


def test_class_preconditions(K4):
    with pytest.raises(PreconditionError):
        symmetrize_class(K4, (0,), (1,))


def test_vertex_psi_gain_two():
    H = Hypergraph(3, 8, [(0, 2, 3), (1, 4, 5), (2, 6, 7)])
    Hp = symmetrize_vertex(H, 0, 1)
    assert len(Hp) == len(H) and psi(Hp) - psi(H) == 2


def test_vertex_psi_gain_can_exceed_two():
    # removing 0's edge also gives 1 and 2 identical (empty) links
    Hp = symmetrize_vertex(TWO, 0, 3)
    assert psi(Hp) - psi(TWO) == 4


def test_vertex_increase():
    assert len(symmetrize_vertex(UNEVEN, 0, 3)) > len(UNEVEN)


def test_singleton_modes_coincide():
    assert symmetrize_vertex(TWO, 0, 3) == symmetrize_class(TWO, (0,), (3,))


def test_run_blow_up_is_colourable(K4):
    B, _ = blow_up(K4, [2, 2, 2, 2])
    tr = run_symmetrization(B, FAMILY, 7)
    assert len(tr.steps) == 1 and tr.outcome == "colorable(0)"


def test_run_two_edges():
    tr = run_symmetrization(TWO, FAMILY, 7)
    assert tr.outcome in ("semibipartite", "colorable(0)", "colorable(1)")
    assert tr.is_strictly_increasing()


def test_run_semibipartite():
    for H in (star(7), Hypergraph(3, 7, [(0, a, b) for a, b in itertools.combinations(range(3, 7), 2)])):
        tr = run_symmetrization(H, FAMILY, 7)
        assert tr.outcome == "semibipartite"
        assert check_semibipartition(tr.final, tr.certificate["A"])


def test_run_detects_non_free():
    tr = run_symmetrization(complete(5), FAMILY, 7)
    assert tr.outcome == "not-free-detected"


def test_run_class_mode():
    tr = run_symmetrization(TWO, mode="class")
    assert tr.is_strictly_increasing() and find_missing_class_pair(tr.final) is None


def test_mfrak_examples(K4):
    r = max_colorable_edges([K4], 8)
    assert (r.value, r.sizes, r.exact) == (32, (2, 2, 2, 2), True)
    for n in (4, 8, 12, 16, 20):
        assert max_colorable_edges([K4], n).value == Fraction(1, 16) * n ** 3
    for n in (8, 12, 16):
        assert max_colorable_edges([K4], n).value >= 6 * Fraction(1, 16) * comb(n, 3)


def test_mfrak_toy_equality():
    # the toy (54, 2, 1) graph has Lagrangian 17/108 attained at the uniform point
    G = assemble_Gi(54, 2, 1).G
    lam = lambda_t(18)
    assert len(G) == lam * 54 ** 3
    r = max_colorable_edges([G], 108)
    assert not r.exact
    assert r.value == lam * 108 ** 3


def test_semibipartite_max():
    assert semibipartite_max(6) == 12
    assert semibipartite_max(3) == 1
    for n in range(1, 201):
        assert 27 * semibipartite_max(n) <= 2 * n ** 3
    assert abs(Fraction(semibipartite_max(200), comb(200, 3)) - Fraction(4, 9)) <= Fraction(1, 200)


def test_transversal_full_blow_up(K4):
    H, part = blow_up(K4, [5, 5, 5, 5])
    r = sample_transversal(H, K4, part, [], [0, 1, 2, 3], Fraction(1, 10 ** 6), seed=0)
    assert r.tries == 1 and all(part.block_of[u] == j for j, u in r.selection.items())


def test_transversal_empty_T(K4):
    H, part = blow_up(K4, [3, 3, 3, 3])
    r = sample_transversal(H, K4, part, [], [], Fraction(1, 100))
    assert r.selection == {} and r.tries == 1


def test_transversal_with_deletions(K4):
    # n = 40, eta = 1/4096: gate (a) needs |V_j| >= 4 * eta^(1/3) * 40 = 10
    H, part = blow_up(K4, [10, 10, 10, 10])
    eta = Fraction(1, 4096)
    rng = np.random.default_rng(0)
    drop = set(map(tuple, rng.choice(len(H), size=int(eta * 40 ** 3), replace=False).reshape(-1, 1)))
    H2 = Hypergraph(3, 40, [e for i, e in enumerate(H.edges) if (i,) not in drop])
    tries = []
    for seed in range(30):
        r = sample_transversal(H2, K4, part, [], [0, 1, 2, 3], eta, seed=seed, tries=50)
        assert all(r.gates.values())
        assert r.selection is not None
        tries.append(r.tries)
    assert np.mean(tries) <= 3


def test_transversal_with_S(K4):
    H, part = blow_up(K4, [6, 6, 6, 6])
    S = list(part.blocks[3][:2])
    r = sample_transversal(H, K4, part, S, [0, 1, 2], Fraction(1, 10 ** 6), seed=1)
    assert r.tries == 1
    with pytest.raises(PreconditionError):
        sample_transversal(H, K4, part, S, [0, 3], Fraction(1, 100))


def test_strip_balanced(K4):
    H, _ = blow_up(K4, [3, 3, 3, 3])
    rep = strip_and_color(H, Fraction(1, 16), Fraction(1, 100), FAMILY)
    assert rep["Z"] == [] and rep["colorable"] == 0 and rep["Z_size_bound"] == "pass"


def test_strip_isolated(K4):
    # blocks of 11 plus 2 isolated vertices, sqrt(eps) n / 2 = 2
    B, _ = blow_up(K4, [11] * 4)
    H = Hypergraph(3, 46, B.edges)
    eps = Fraction(4, 529)
    rep = strip_and_color(H, Fraction(1, 16), eps, FAMILY)
    assert rep["Z"] == [44, 45]
    assert rep["colorable"] == 0 and rep["stripped_vertices"] == 44
    # the isolated vertices cost more than eps n^3 edges, so the size bound is not asserted
    assert rep["Z_size_bound"] == "hypothesis-not-met"


def test_strip_sparse():
    rep = strip_and_color(star(9), Fraction(1, 16), Fraction(1, 1000), FAMILY)
    assert not rep["edge_gate"] and rep["Z_size_bound"] == "hypothesis-not-met"


# ---- properties


@settings(max_examples=80)
@given(hypergraphs(max_n=7), st.sampled_from(["vertex", "class"]))
def test_steps_map_into_predecessors(H, mode):
    tr = run_symmetrization(H, mode=mode, keep_graphs=True)
    assert tr.is_strictly_increasing()
    assert len(tr.steps) - 1 <= comb(H.n, 3) * H.n ** 2
    for a, b in zip(tr.graphs, tr.graphs[1:]):
        assert find_homomorphism(b, a) is not None


@settings(max_examples=40)
@given(hypergraphs(max_n=7))
def test_hom_freeness_preserved(H):
    tr = run_symmetrization(H, keep_graphs=True)
    for F in (complete(4), fano(), EDGE):
        for a, b in zip(tr.graphs, tr.graphs[1:]):
            if find_homomorphism(F, a) is None:
                assert find_homomorphism(F, b) is None


@given(hypergraphs(max_n=9))
def test_terminal_shadow_complete_multipartite(H):
    T = run_symmetrization(H).final
    part = equivalence_classes(T)
    cd = T.pair_codegrees
    for u, v in itertools.combinations(range(T.n), 2):
        if part.block_of[u] != part.block_of[v]:
            assert (u, v) in cd


@given(st.integers(3, 30))
def test_single_edge_mfrak(n):
    best = max(x * y * (n - x - y) for x in range(n + 1) for y in range(n + 1 - x))
    assert max_colorable_edges([EDGE], n).value == best
    q, r = divmod(n, 3)
    parts = [q + (i < r) for i in range(3)]
    assert best == parts[0] * parts[1] * parts[2]


def test_strip_with_configured_zeta(K4):
    from conftest import zeta
    H, _ = blow_up(K4, [5, 5, 5, 5])
    rep = strip_and_color(H, Fraction(1, 16), zeta(7), FAMILY)
    assert rep["Z"] == [] and rep["colorable"] == 0

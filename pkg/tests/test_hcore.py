import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypext.errors import BudgetExceeded, InvalidUniformity, VertexRangeError
from hypext.hcore import (
    Hypergraph, Z_eps, blow_up, blow_up_edge_count, codegree, complete, degree, densities,
    edit_distance_d1, equivalence_classes, fano, is_semibipartite, is_two_covered, link,
    min_max_codegree, min_transversal, psi, shadow, star, transversal_number,
)

from conftest import hypergraphs

EDGE = Hypergraph(3, 3, [(0, 1, 2)])


def test_shadow_examples(K4):
    assert shadow(K4).edges == tuple(itertools.combinations(range(4), 2))
    assert shadow(Hypergraph(3, 5, [(0, 1, 2)])).edges == ((0, 1), (0, 2), (1, 2))
    assert len(shadow(Hypergraph(3, 4))) == 0
    assert shadow(K4).n == 4


def test_densities(K4, F7):
    assert densities(K4) == (1, 1)
    assert densities(EDGE) == (1, 1)
    assert densities(F7) == (1, Fraction(1, 5))


def test_link_degree(K4, F7):
    assert link(K4, 0).edges == ((1, 2), (1, 3), (2, 3))
    assert degree(K4, 0) == 3
    assert degree(Hypergraph(3, 4), 2) == 0
    assert all(degree(F7, v) == 3 for v in range(7))


def test_codegrees(F7):
    assert min_max_codegree(complete(6)) == (4, 4)
    assert min_max_codegree(F7) == (1, 1)
    assert codegree(F7, 0, 1) == 1


def test_vertex_range_errors(K4):
    with pytest.raises(VertexRangeError):
        degree(K4, 4)
    with pytest.raises(InvalidUniformity):
        Hypergraph(3, 4, [(0, 1)])


def test_blow_up_examples(K4):
    assert blow_up(EDGE, [1, 1, 1])[0] == EDGE
    assert len(blow_up(EDGE, [2, 2, 2])[0]) == 8
    H, part = blow_up(K4, [2, 2, 2, 2])
    assert len(H) == 32 == blow_up_edge_count(K4, [2, 2, 2, 2])
    assert part.sizes() == [2, 2, 2, 2]


def test_two_covered(K4, F7):
    assert is_two_covered(K4, range(4))
    assert not is_two_covered(Hypergraph(3, 4, [(0, 1, 2)]), [0, 3])
    assert is_two_covered(F7, range(7))


def test_transversal_examples(K4):
    assert transversal_number(Hypergraph(3, 5)) == 0
    assert transversal_number(star(6)) == 1
    assert transversal_number(K4) == 2


def test_transversal_budget():
    with pytest.raises(BudgetExceeded):
        transversal_number(complete(9), budget=3)


def test_equivalence_and_psi(K4):
    H, _ = blow_up(EDGE, [2, 2, 2])
    assert equivalence_classes(H).sizes() == [2, 2, 2]
    assert psi(H) == 12
    assert equivalence_classes(K4).sizes() == [1, 1, 1, 1]
    assert psi(K4) == 4
    assert equivalence_classes(Hypergraph(3, 5)).sizes() == [5]
    assert psi(Hypergraph(3, 5)) == 25


def test_semibipartite_examples(K4):
    w = is_semibipartite(star(6))
    assert w is not None and w.blocks[0] == (0,)
    assert is_semibipartite(K4) is None
    w = is_semibipartite(Hypergraph(3, 4))
    assert w is not None and w.blocks[0] == ()


def test_d1_examples(K4):
    assert edit_distance_d1(K4, K4) == 0
    assert edit_distance_d1(Hypergraph(3, 4, [(0, 1, 2)]), Hypergraph(3, 4, [(1, 2, 3)])) == 0
    assert edit_distance_d1(EDGE, Hypergraph(3, 3)) == 1


def test_Z_eps_examples():
    # a regular graph well above the threshold
    assert Z_eps(complete(6), Fraction(1, 16), Fraction(1, 100)) == []
    H = Hypergraph(3, 5, [(0, 1, 2), (0, 1, 3), (1, 2, 3)])
    assert 4 in Z_eps(H, Fraction(1, 6), Fraction(1, 100))


def test_Z_eps_halved_block(K4):
    # blocks of sizes (4,4,4,2): the full blocks have degree 32, the halved one 48
    H, part = blow_up(K4, [4, 4, 4, 2])
    assert {H.degrees[v] for v in part.blocks[0]} == {32}
    assert {H.degrees[v] for v in part.blocks[3]} == {48}
    # threshold 3/16*196 - 2/20*196 = 17.15: nothing is removed
    assert Z_eps(H, Fraction(1, 16), Fraction(1, 400)) == []
    # threshold 49 - 3.92 = 45.08 separates 32 from 48: the full blocks are removed
    Z = Z_eps(H, Fraction(1, 12), Fraction(1, 10000))
    assert Z == list(range(12))


# ---- properties


@given(hypergraphs(), st.data())
def test_shadow_monotone(H, data):
    extra = data.draw(st.lists(st.sampled_from(list(itertools.combinations(range(H.n), 3))), max_size=3))
    H2 = Hypergraph(3, H.n, list(H.edges) + extra)
    assert shadow(H).edge_set <= shadow(H2).edge_set
    assert len(shadow(H)) <= 3 * len(H)


@given(st.lists(st.integers(1, 3), min_size=4, max_size=4))
def test_blow_up_composition(sizes):
    G = complete(4)
    H, _ = blow_up(G, sizes)
    again, _ = blow_up(H, [1] * H.n)
    assert again == H
    assert len(H) == blow_up_edge_count(G, sizes)


@given(hypergraphs())
def test_classes_nonadjacent_and_psi(H):
    part = equivalence_classes(H)
    cd = H.pair_codegrees
    for b in part.blocks:
        assert all((u, v) not in cd for u, v in itertools.combinations(b, 2))
    p = psi(H)
    assert p >= H.n
    assert (p == H.n) == all(len(b) == 1 for b in part.blocks)


@given(hypergraphs(max_n=8))
def test_transversal_matches_enumeration(H):
    best = next(k for k in range(H.n + 1)
                for S in itertools.combinations(range(H.n), k)
                if all(set(S) & set(e) for e in H.edges))
    assert transversal_number(H) == best
    T = min_transversal(H)
    assert all(set(T) & set(e) for e in H.edges)


@settings(max_examples=25)
@given(hypergraphs(min_n=4, max_n=6), hypergraphs(min_n=4, max_n=6), hypergraphs(min_n=4, max_n=6))
def test_d1_triangle(A, B, C):
    n = max(A.n, B.n, C.n)
    A, B, C = (Hypergraph(3, n, X.edges) for X in (A, B, C))
    assert edit_distance_d1(A, C) <= edit_distance_d1(A, B) + edit_distance_d1(B, C)

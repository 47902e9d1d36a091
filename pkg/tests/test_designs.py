import itertools
from math import comb

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from hypext.designs import (
    Design, build_design, build_regular_3graph, exact_cover_design, expand_H, hermitian_unital,
    lu_szekely_condition, pack, pair_coverage_ok,
)
from hypext.errors import BudgetExceeded, DesignError
from hypext.hcore import Hypergraph, complete, fano, min_max_codegree

SMALL = [(7, 3), (9, 3), (13, 3), (15, 3), (19, 3), (21, 3), (57, 3), (13, 4), (16, 4), (21, 5), (25, 5), (28, 4)]


@pytest.mark.parametrize("n,k", SMALL)
def test_designs_verify(n, k):
    D = build_design(n, k)
    assert len(D.blocks) == comb(n, 2) // comb(k, 2)
    counts = {p: 0 for p in itertools.combinations(range(n), 2)}
    for b in D.blocks.edges:
        for p in itertools.combinations(b, 2):
            counts[p] += 1
    assert set(counts.values()) == {1}
    HD = expand_H(D)
    assert 6 * len(HD) == (k - 2) * n * (n - 1)
    G = Hypergraph(3, n, [e for e in complete(n).edges if e not in HD.edge_set])
    assert min_max_codegree(G) == (n - k, n - k)


def test_examples():
    D = build_design(7, 3)
    assert len(D.blocks) == 7
    # the STS(7) is a Fano plane up to relabelling: every pair lies on one line
    assert pair_coverage_ok(7, fano().edges)
    assert len(build_design(9, 3).blocks) == 12
    assert build_design(6, 2).blocks.edges == tuple(itertools.combinations(range(6), 2))
    assert expand_H(D).edges == D.blocks.edges
    assert len(expand_H(build_design(8, 2))) == 0
    assert len(expand_H(build_design(13, 4))) == 52


def test_inadmissible():
    with pytest.raises(DesignError):
        build_design(8, 3)
    with pytest.raises(DesignError):
        build_design(10, 4)


def test_unital_q5():
    blocks = hermitian_unital(5)
    assert len(blocks) == 525
    assert pair_coverage_ok(126, blocks)


def test_exact_cover_small_and_budget():
    assert pair_coverage_ok(7, exact_cover_design(7, 3))
    with pytest.raises(BudgetExceeded):
        exact_cover_design(25, 4, budget=1000)


def test_regular_examples():
    S = build_regular_3graph(6, 1)
    assert set(S.degrees) == {1} and len(S) == 2
    S = build_regular_3graph(9, 2)
    assert set(S.degrees) == {2} and len(S) == 6
    assert len(build_regular_3graph(12, 0)) == 0


@given(st.sampled_from([6, 9, 12, 15, 57]), st.integers(0, 12), st.integers(0, 1000))
def test_regular_property(n, s, seed):
    assume(s <= comb(n - 1, 2))
    S = build_regular_3graph(n, s, seed)
    assert S.degrees == (s,) * n
    assert len(S.edges) == len(set(S.edges)) == s * n // 3


def test_lu_szekely_examples():
    assert lu_szekely_condition(Hypergraph(3, 7), Hypergraph(3, 7))
    assert not lu_szekely_condition(complete(6), complete(6))
    HD = expand_H(build_design(57, 3))
    assert lu_szekely_condition(build_regular_3graph(57, 1), HD)


def test_pack_examples():
    w = pack(Hypergraph(3, 6), Hypergraph(3, 6, [(0, 1, 2)]))
    assert w.phi == tuple(range(6))
    w = pack(Hypergraph(3, 6, [(0, 1, 3)]), Hypergraph(3, 6, [(0, 1, 2)]))
    assert w.phi == tuple(range(6))
    HD = expand_H(build_design(57, 3))
    S = build_regular_3graph(57, 1)
    w = pack(S, HD, seed=3)
    img = w.apply(S)
    assert w.verified and not (img.edge_set & HD.edge_set)
    assert set(img.degrees) == {1}


def test_pack_budget_exhaustion():
    with pytest.raises(BudgetExceeded):
        pack(complete(6), complete(6), budget=50, restarts=1)


def test_design_record():
    D = Design(7, 3, fano(), "given")
    assert D.verify()

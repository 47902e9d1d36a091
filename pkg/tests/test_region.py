import csv
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypext.errors import PreconditionError
from hypext.forge import assemble_Gi, lambda_t
from hypext.hcore import Hypergraph, blow_up, complete, densities
from hypext.region import (
    RegionPoint, blowup_points, complete_semibipartite, emit_region, markers_for, region_csv,
    semibipartite_asymptote, semibipartite_curve, semibipartite_point, shadow_lower_bound_check,
)


def test_semibipartite_examples():
    p = semibipartite_point(10, 1)
    assert p.y == Fraction(3, 10) and p.x == 1
    p = semibipartite_curve(300, [Fraction(1, 3)])[0]
    ax, ay = semibipartite_asymptote(Fraction(1, 3))
    assert (ax, ay) == (Fraction(8, 9), Fraction(4, 9))
    assert abs(p.x - ax) <= Fraction(1, 100) and abs(p.y - ay) <= Fraction(1, 100)
    n = 12
    assert semibipartite_point(n, n - 2).y == Fraction(n - 2, comb(n, 3))
    with pytest.raises(PreconditionError):
        semibipartite_point(10, 9)


@given(st.integers(4, 40), st.data())
def test_semibipartite_matches_graph(n, data):
    a = data.draw(st.integers(1, n - 2))
    p = semibipartite_point(n, a)
    assert densities(complete_semibipartite(n, a)) == (p.x, p.y)
    assert p.y * comb(n, 3) * 27 <= 2 * n ** 3


def test_blowup_examples(K4):
    pts = blowup_points(K4, [1, 5])
    assert (pts[0].x, pts[0].y) == densities(K4)
    n = 20
    assert pts[1].x == Fraction(6 * 25, comb(n, 2)) and pts[1].y == Fraction(4 * 125, comb(n, 3))
    assert (pts[-1].x, pts[-1].y, pts[-1].n) == (Fraction(3, 4), Fraction(3, 8), None)


def test_blowup_toy_57():
    G = assemble_Gi(57, 3, 0).G
    pts = blowup_points(G, [2])
    assert pts[-1].y == Fraction(6 * len(G), 57 ** 3)
    assert abs(pts[0].y - pts[-1].y) <= Fraction(2, 57)


def test_blowup_x_converges_monotonically(F7):
    for G in (complete(4), F7):
        pts = blowup_points(G, range(1, 21))
        xs = [p.x for p in pts[:-1]]
        assert all(a > b for a, b in zip(xs, xs[1:]))
        assert all(x > pts[-1].x for x in xs)
        assert pts[-1].x == 1 - Fraction(1, G.n)


def test_peak_equality():
    lam = lambda_t(18)
    ys = [blowup_points(assemble_Gi(n, k, s).G, [1])[-1].y for n, k, s in [(54, 2, 1), (126, 6, 3)]]
    assert ys == [6 * lam, 6 * lam]


def test_points_in_box():
    with pytest.raises(PreconditionError):
        RegionPoint(Fraction(3, 2), Fraction(0), "custom", 3)


def test_shadow_bound(K4):
    H, part = blow_up(K4, [5, 5, 5, 5])
    rep = shadow_lower_bound_check(H, K4, Fraction(1, 1000), Fraction(1, 16))
    assert rep["status"] == "pass" and rep["missing_pairs"] == 0
    # eps too large for the hypothesis to be checked against a sparse graph
    sparse = Hypergraph(3, 20, H.edges[:10])
    assert shadow_lower_bound_check(sparse, K4, Fraction(1, 1000), Fraction(1, 16))["status"] == "hypothesis-not-met"


def test_shadow_bound_with_deletions(K4):
    H, part = blow_up(K4, [6, 6, 6, 6])
    eps = Fraction(1, 200)
    n = H.n
    drop = int(eps * n ** 3)
    H2 = Hypergraph(3, n, H.edges[::7][drop:] + H.edges[1::7] + H.edges[2::7] + H.edges[3::7]
                    + H.edges[4::7] + H.edges[5::7] + H.edges[6::7])
    assert len(H) - len(H2) <= drop
    rep = shadow_lower_bound_check(H2, K4, eps, Fraction(1, 16))
    assert rep["status"] == "pass"


def test_csv(tmp_path, K4):
    p = tmp_path / "r.csv"
    emit_region([], p)
    assert p.read_text() == "x,y,family,n\n"
    pts = blowup_points(K4, [1, 2])
    path, stub = emit_region(pts, p, *markers_for([4, 7], Fraction(17, 108)))
    rows = list(csv.DictReader(open(path)))
    assert rows[-1] == {"x": "0.750000000000", "y": "0.375000000000", "family": "blowup(1)", "n": "inf"}
    text = stub.read_text()
    assert "VERTICAL = [0.750000000000, 0.857142857143]" in text
    assert "HORIZONTAL = [0.944444444444]" in text
    compile(text, str(stub), "exec")


def test_csv_deterministic(K4):
    pts = blowup_points(K4, [1, 2, 3]) + semibipartite_curve(10, [Fraction(1, 2)])
    assert region_csv(pts) == region_csv(list(pts))

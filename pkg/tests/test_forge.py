from fractions import Fraction
from math import comb, gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypext.errors import PreconditionError
from hypext.forge import (
    FamilyParams, assemble_Gi, construct_params, derive_s_sequence, lambda_in_interval, lambda_t,
    solve_Q, verify_divisibility, verify_gap, verify_observation,
)
from hypext.hcore import is_two_covered, min_max_codegree
from hypext.lagrange import design_lagrangian


def brute_Q(s, C):
    Q = 2
    while True:
        if Q >= C and all((Q // 2 - x * x) % (x * (2 * x - 1)) == 0 for x in s):
            return Q
        Q += 2


def test_s_sequence():
    assert derive_s_sequence(1, 3, 3) == [3]
    assert derive_s_sequence(2, 3, 3) == [3, 16]
    assert derive_s_sequence(3, 3, 3) == [3, 16, 3 * 5 * 16 * 31 + 1]
    with pytest.raises(PreconditionError):
        derive_s_sequence(2, 3, 4)


def test_solve_Q_examples():
    assert solve_Q([3], 1) == 18
    assert solve_Q([3], 100) == 108
    Q = solve_Q([3, 16], 1)
    assert Q == brute_Q([3, 16], 1) == 8448
    assert Q % 30 == 18 and (Q // 2) % 496 == 256


@given(st.integers(1, 6), st.integers(1, 10 ** 4))
def test_solve_Q_matches_scan(s1, C):
    s = derive_s_sequence(2, 1, s1)
    mods = [x * (2 * x - 1) for x in s]
    if mods[0] * mods[1] > 10 ** 7:
        return
    assert solve_Q(s, C) == brute_Q(s, C)


def test_divisibility_report():
    P = construct_params(1, 3, 1)
    assert P.n == (126,) and P.Q == 18
    assert verify_divisibility(P).ok
    for t in (2, 3):
        assert verify_divisibility(construct_params(t, 3, 1)).ok
    bad = FamilyParams(1, 3, (3,), (6,), 1, 17, (119,), lambda_t(17))
    rep = verify_divisibility(bad)
    assert "Q_even" in rep.failures()


def test_known_C_terms():
    P = construct_params(2, 3, 1)
    C = max(2 * P.k[-1] ** 3, 3 ** 8)
    P2 = construct_params(2, 3, C)
    assert P2.Q >= 2 * P2.k[-1] ** 3 and P2.Q >= 6561
    assert P2.known_C_terms() == {"2k_t^3": 2 * 32 ** 3, "3^8": 6561}


def test_params_json_round_trip():
    P = construct_params(3, 3, 1)
    assert FamilyParams.from_json(P.to_json()) == P


def test_lambda_values():
    assert lambda_t(16) == Fraction(5, 32)
    assert lambda_t(18) == Fraction(17, 108)
    assert lambda_in_interval(16) and not lambda_in_interval(15)
    assert all(lambda_t(Q) < Fraction(1, 6) for Q in (10 ** 6, 10 ** 30))


@pytest.mark.parametrize("t", [1, 2, 3])
def test_lambda_identity(t):
    P = construct_params(t, 3, 1)
    for k, n, s in zip(P.k, P.n, P.s):
        assert design_lagrangian(n, k, s) == lambda_t(P.Q)


def test_gap():
    P = construct_params(2, 3, 1)
    a = Fraction(P.n[0] - 1, P.k[0] - 1) - Fraction(P.n[1] - 1, P.k[1] - 1)
    assert a > Fraction(P.Q, P.k[0] ** 2)
    assert verify_gap(P)


def test_assembly_counts():
    A = assemble_Gi(57, 3, 0)
    assert A.edge_count == 28728 == len(A.G)
    B = assemble_Gi(57, 3, 1)
    assert B.edge_count == 28728 - 19 == len(B.G)
    C = assemble_Gi(12, 2, 2)
    assert len(C.G) == comb(12, 3) - 8 and len(C.HD) == 0
    assert is_two_covered(B.G, range(57))


def test_observation_57_3_0():
    rep = verify_observation(assemble_Gi(57, 3, 0))
    assert rep.ok
    assert rep.checks["codegree_window_general"]["min"] == 54 == rep.checks["codegree_window_general"]["max"]
    assert rep.checks["link_clique"]["omegas"] == [28]
    assert rep.checks["codegree_window"]["status"] == "hypothesis-not-met"


def test_observation_k_equals_2s():
    A = assemble_Gi(54, 2, 1)
    rep = verify_observation(A, params=None)
    assert rep.ok and rep.checks["codegree_window"]["status"] == "pass"
    assert set(A.G.degrees) == {3 * lambda_t(18) * 54 ** 2}


def test_materialization_cap():
    A = assemble_Gi(57, 3, 0, vertex_cap=10)
    with pytest.raises(PreconditionError):
        A.G
    # the structured form still works
    assert A.form().edge_count == 28728


@pytest.mark.parametrize("n,k,s", [(9, 3, 1), (15, 3, 2), (13, 4, 0), (21, 3, 1)])
def test_assembly_property(n, k, s):
    A = assemble_Gi(n, k, s, seed=1)
    assert len(A.G) == A.closed_form_edge_count
    lo, hi = min_max_codegree(A.G)
    assert n - k - 2 * s <= lo and hi <= n - k

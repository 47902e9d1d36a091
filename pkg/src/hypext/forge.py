"""Parameter arithmetic for the family G_1, ..., G_t and assembly of toy instances.

The arithmetic (s-sequence, CRT for Q, divisibility) runs at full size with
Python integers.  Materializing ``G = K_n minus (H(D) + S)`` is only done at
desk scale, behind a vertex cap and an edge cap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd, prod

from .designs import Design, PackingWitness, build_design, build_regular_3graph, expand_H, pack
from .errors import InvariantViolation, PreconditionError
from .hcore import Hypergraph, clique_number, min_max_codegree
from .lagrange import DesignComplementForm, design_lagrangian

DEFAULT_VERTEX_CAP = 5000
DEFAULT_EDGE_CAP = 20_000_000


def derive_s_sequence(t: int, q: int, s1: int | None = None) -> list[int]:
    if t < 1:
        raise PreconditionError("t must be at least 1")
    if q < 1:
        raise PreconditionError("q must be at least 1")
    s1 = q if s1 is None else s1
    if s1 < 1 or s1 % q:
        raise PreconditionError(f"s1 must be a positive multiple of q={q}")
    s = [s1]
    while len(s) < t:
        s.append(prod(x * (2 * x - 1) for x in s) + 1)
    mods = [x * (2 * x - 1) for x in s]
    for a, b in itertools.combinations(mods, 2):
        if gcd(a, b) != 1:
            raise InvariantViolation(f"moduli {a} and {b} are not coprime")
    return s


def _crt(residues: list[int], moduli: list[int]) -> tuple[int, int]:
    x, M = 0, 1
    for r, m in zip(residues, moduli):
        # solve x + M*u = r (mod m)
        u = (r - x) * pow(M, -1, m) % m if m > 1 else 0
        x += M * u
        M *= m
    return x % M, M


def solve_Q(s: list[int], C: int) -> int:
    """Minimal even Q >= C with Q/2 = s_i^2 (mod s_i(2 s_i - 1)) for every i."""
    mods = [x * (2 * x - 1) for x in s]
    h0, M = _crt([x * x % m for x, m in zip(s, mods)], mods)
    lo = max(1, -(-C // 2))
    h = h0 if h0 >= lo else h0 + M * (-(-(lo - h0) // M))
    Q = 2 * h
    for x in s:
        k = 2 * x
        if (Q - k * k // 2) % (k * (k - 1)):
            raise InvariantViolation(f"Q={Q} fails the congruence for k={k}")
    return Q


def lambda_t(Q: int) -> Fraction:
    if Q < 1:
        raise PreconditionError("Q must be positive")
    return Fraction(1, 6) * (1 - Fraction(1, Q))


def lambda_in_interval(Q: int) -> bool:
    """Whether lambda_t(Q) lies in [5/32, 1/6); true exactly when Q >= 16."""
    lam = lambda_t(Q)
    return Fraction(5, 32) <= lam < Fraction(1, 6)


@dataclass(frozen=True)
class FamilyParams:
    t: int
    q: int
    s: tuple[int, ...]
    k: tuple[int, ...]
    C: int
    Q: int
    n: tuple[int, ...]
    lambda_t: Fraction

    def known_C_terms(self) -> dict[str, int]:
        """Known lower-bound terms of the threshold C (Wilson thresholds excluded)."""
        return {"2k_t^3": 2 * self.k[-1] ** 3, "3^8": 3 ** 8}

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "q": self.q,
            "s": list(self.s),
            "k": list(self.k),
            "C": self.C,
            "Q": self.Q,
            "n": list(self.n),
            "lambda_t": f"{self.lambda_t.numerator}/{self.lambda_t.denominator}",
            "known_C_terms": self.known_C_terms(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "FamilyParams":
        return cls(d["t"], d["q"], tuple(d["s"]), tuple(d["k"]), d["C"], d["Q"], tuple(d["n"]),
                   Fraction(d["lambda_t"]))


def construct_params(t: int, q: int, C: int, s1: int | None = None) -> FamilyParams:
    s = derive_s_sequence(t, q, s1)
    Q = solve_Q(s, C)
    k = tuple(2 * x for x in s)
    return FamilyParams(t, q, tuple(s), k, C, Q, tuple(Q * (ki + 1) for ki in k), lambda_t(Q))


@dataclass
class CheckReport:
    """Named pass/fail checks with details; ``ok`` means nothing failed."""

    checks: dict[str, dict] = field(default_factory=dict)

    def add(self, name: str, status: str, **detail) -> None:
        self.checks[name] = {"status": status, **detail}

    def record(self, name: str, passed: bool, **detail) -> None:
        self.add(name, "pass" if passed else "fail", **detail)

    @property
    def ok(self) -> bool:
        return all(c["status"] != "fail" for c in self.checks.values())

    def failures(self) -> list[str]:
        return [k for k, c in self.checks.items() if c["status"] == "fail"]

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": self.checks}


def verify_divisibility(params: FamilyParams) -> CheckReport:
    rep = CheckReport()
    Q = params.Q
    rep.record("Q_even", Q % 2 == 0, Q=Q)
    rep.record("Q_ge_C", Q >= params.C, Q=Q, C=params.C)
    rep.record("lambda", params.lambda_t == lambda_t(Q))
    rep.record("n_increasing", all(a < b for a, b in zip(params.n, params.n[1:])))
    for i, (s, k, n) in enumerate(zip(params.s, params.k, params.n), start=1):
        rep.record(f"k_{i}=2s_{i}", k == 2 * s)
        rep.record(f"congruence_{i}", k % 2 == 0 and (Q - k * k // 2) % (k * (k - 1)) == 0)
        rep.record(f"q|n_{i}", n % params.q == 0)
        rep.record(f"(k-1)|(n-1)_{i}", (n - 1) % (k - 1) == 0)
        rep.record(f"k(k-1)|n(n-1)_{i}", (n * (n - 1)) % (k * (k - 1)) == 0)
        rep.record(f"Q=n/(k+1)_{i}", n % (k + 1) == 0 and n // (k + 1) == Q)
    return rep


# ---------------------------------------------------------------------------
# assembly


@dataclass
class GiAssembly:
    n: int
    k: int
    s: int
    design: Design
    HD: Hypergraph
    regular: Hypergraph
    packing: PackingWitness
    S: Hypergraph
    vertex_cap: int = DEFAULT_VERTEX_CAP
    edge_cap: int = DEFAULT_EDGE_CAP
    _G: Hypergraph | None = None

    @property
    def edge_count(self) -> int:
        return comb(self.n, 3) - len(self.HD) - len(self.S)

    @property
    def closed_form_edge_count(self) -> int:
        return comb(self.n, 3) - (self.k - 2) * self.n * (self.n - 1) // 6 - self.s * self.n // 3

    @property
    def nks(self) -> tuple[int, int, int]:
        return (self.n, self.k, self.s)

    def form(self) -> DesignComplementForm:
        """Lagrangian form of G that never lists its edges."""
        return DesignComplementForm(self.n, self.design.blocks.edges if self.k >= 3 else [], self.S)

    @property
    def G(self) -> Hypergraph:
        if self._G is None:
            if self.n > self.vertex_cap or self.edge_count > self.edge_cap:
                raise PreconditionError(
                    f"materializing G with n={self.n} and {self.edge_count} edges exceeds the caps "
                    f"(vertices {self.vertex_cap}, edges {self.edge_cap})")
            removed = self.HD.edge_set | self.S.edge_set
            self._G = Hypergraph(3, self.n, (e for e in itertools.combinations(range(self.n), 3) if e not in removed))
            if len(self._G) != self.edge_count:
                raise InvariantViolation("materialized G has the wrong size")
        return self._G

    def report(self) -> dict:
        return {
            "n": self.n, "k": self.k, "s": self.s,
            "design_method": self.design.method,
            "design_blocks": len(self.design.blocks),
            "H_D_edges": len(self.HD),
            "S_edges": len(self.S),
            "G_edges": self.edge_count,
            "G_edges_closed_form": self.closed_form_edge_count,
            "packing_attempts": self.packing.attempts,
            "packing_condition_held": self.packing.condition_held,
            "lagrangian_closed_form": str(design_lagrangian(self.n, self.k, self.s)),
        }


def assemble_Gi(n: int, k: int, s: int, seed: int = 0, vertex_cap: int = DEFAULT_VERTEX_CAP,
                edge_cap: int = DEFAULT_EDGE_CAP, pack_budget: int = 200_000) -> GiAssembly:
    D = build_design(n, k)
    HD = expand_H(D) if k >= 3 else Hypergraph(3, n)
    Sp = build_regular_3graph(n, s, seed)
    witness = pack(Sp, HD, seed=seed, budget=pack_budget)
    S = witness.apply(Sp)
    if S.edge_set & HD.edge_set:
        raise InvariantViolation("S meets H(D) after packing")
    A = GiAssembly(n, k, s, D, HD, Sp, witness, S, vertex_cap, edge_cap)
    if A.edge_count != A.closed_form_edge_count:
        raise InvariantViolation("edge count differs from the closed form")
    return A


def verify_observation(assembly: GiAssembly, lam: Fraction | None = None,
                       params: FamilyParams | None = None) -> CheckReport:
    """Structural checks on an assembled G: regularity, codegrees, link cliques, gaps.

    A check that needs the k = 2s regime is reported as ``hypothesis-not-met``
    when the toy parameters are outside it.
    """
    n, k, s = assembly.nks
    lam = design_lagrangian(n, k, s) if lam is None else Fraction(lam)
    rep = CheckReport()
    G = assembly.G
    degs = set(G.degrees)
    target = 3 * lam * n * n
    rep.record("regular", len(degs) == 1, degrees=sorted(degs))
    rep.record("degree=3*lambda*n^2", degs == {target}, expected=str(target))

    lo, hi = min_max_codegree(G)
    rep.record("codegree_window_general", n - k - s <= lo and hi <= n - k, min=lo, max=hi, window=[n - k - s, n - k])
    if k == 2 * s:
        rep.record("codegree_window", Fraction(7 * n, 8) <= n - Fraction(3 * k, 2) <= lo and hi <= n - k,
                   min=lo, max=hi)
    else:
        rep.add("codegree_window", "hypothesis-not-met", reason="k != 2s", min=lo, max=hi)

    if (n - 1) % (k - 1) == 0:
        top = (n - 1) // (k - 1)
        low = Fraction(top) - (Fraction(k, 2) if k == 2 * s else s)
        omegas = set()
        for v in range(n):
            L = Hypergraph(2, n, G.links[v])
            omegas.add(clique_number(L, [u for u in range(n) if u != v]))
        rep.record("link_clique", all(low <= w <= top for w in omegas), omegas=sorted(omegas), bounds=[str(low), top])
    if params is not None:
        rep.record("link_gap", verify_gap(params), pairs=params.t - 1)
    return rep


def verify_gap(params: FamilyParams) -> bool:
    """(n_i-1)/(k_i-1) - (n_{i+1}-1)/(k_{i+1}-1) > Q/k_i^2 for consecutive i, exactly."""
    Q = params.Q
    for i in range(params.t - 1):
        a = Fraction(params.n[i] - 1, params.k[i] - 1)
        b = Fraction(params.n[i + 1] - 1, params.k[i + 1] - 1)
        if not a - b > Fraction(Q, params.k[i] ** 2):
            return False
    return True

"""Points in the (shadow density, edge density) plane for constructed families."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Iterable, Sequence

from .errors import PreconditionError
from .family import HomMap, find_homomorphism
from .hcore import DEFAULT_BUDGET, Hypergraph, densities, shadow

SEMIBIPARTITE = "semibipartite"
CSV_HEADER = "x,y,family,n"
BUILD_CAP = 60


def blowup_tag(i: int) -> str:
    return f"blowup({i})"


@dataclass(frozen=True)
class RegionPoint:
    x: Fraction
    y: Fraction
    family: str
    n: int | None  # None marks the limit row

    def __post_init__(self):
        if not (0 <= self.x <= 1 and 0 <= self.y <= 1):
            raise PreconditionError(f"point ({self.x}, {self.y}) lies outside the unit square")


def semibipartite_point(n: int, a: int) -> RegionPoint:
    if not 1 <= a <= n - 2:
        raise PreconditionError(f"need 1 <= a <= n-2, got a={a}, n={n}")
    x = 1 - Fraction(comb(a, 2), comb(n, 2))
    y = Fraction(a * comb(n - a, 2), comb(n, 3))
    return RegionPoint(x, y, SEMIBIPARTITE, n)


def complete_semibipartite(n: int, a: int) -> Hypergraph:
    """All triples with one vertex in A = {0..a-1} and two in the rest."""
    B = range(a, n)
    return Hypergraph(3, n, ((v, b1, b2) for v in range(a) for b1 in B for b2 in B if b1 < b2))


def semibipartite_curve(n: int, alphas: Iterable) -> list[RegionPoint]:
    """Exact density points of the complete semibipartite graph with |A| = round(alpha n).

    For n up to a small cap the graph is also built and its densities compared
    against the closed forms.
    """
    pts = []
    for alpha in alphas:
        alpha = Fraction(alpha)
        if not 0 < alpha < 1:
            raise PreconditionError("alpha must lie in (0, 1)")
        a = round(alpha * n)
        p = semibipartite_point(n, a)
        if n <= BUILD_CAP:
            if densities(complete_semibipartite(n, a)) != (p.x, p.y):
                raise AssertionError("semibipartite closed form disagrees with the built graph")
        pts.append(p)
    return pts


def semibipartite_asymptote(alpha) -> tuple[Fraction, Fraction]:
    alpha = Fraction(alpha)
    return 1 - alpha * alpha, 3 * alpha * (1 - alpha) ** 2


def blowup_points(G: Hypergraph, multiples: Sequence[int], family: str = "blowup(1)",
                  limit: bool = True) -> list[RegionPoint]:
    """Balanced blow-ups of G with every vertex replaced by m copies, plus the m -> inf row."""
    if G.r != 3:
        raise PreconditionError("blow-up points are defined for 3-graphs")
    v = G.n
    sh = len(G.pair_codegrees)
    pts = []
    for m in multiples:
        if m < 1:
            raise PreconditionError("multiples must be positive")
        N = m * v
        pts.append(RegionPoint(Fraction(sh * m * m, comb(N, 2)), Fraction(len(G) * m ** 3, comb(N, 3)), family, N))
    if limit:
        pts.append(RegionPoint(Fraction(2 * sh, v * v), Fraction(6 * len(G), v ** 3), family, None))
    return pts


def shadow_lower_bound_check(H: Hypergraph, G: Hypergraph, eps, lam, coloring: HomMap | None = None,
                             budget: int = DEFAULT_BUDGET) -> dict:
    """Check |dH| >= ((m-1)/(2m) - 3 sqrt(eps) m) n^2 for a G-colourable H, m = v(G).

    ``lam`` is the density threshold of the hypothesis |H| >= (lam - eps) n^3.
    Also counts the missing cross pairs M of the colouring.  Nothing is
    asserted when a hypothesis fails; the report says which.
    """
    eps, lam = Fraction(eps), Fraction(lam)
    n, m = H.n, G.n
    rep: dict = {"n": n, "n_i": m, "edges": len(H)}
    if coloring is None:
        coloring = find_homomorphism(H, G, budget)
    if coloring is None or not coloring.verify(H, G):
        rep["status"] = "hypothesis-not-met"
        rep["reason"] = "H is not G-colourable"
        return rep
    sh = len(shadow(H))
    rep["shadow"] = sh
    cov = H.pair_codegrees
    mp = coloring.map
    missing = sum(1 for u in range(n) for w in range(u + 1, n) if mp[u] != mp[w] and (u, w) not in cov)
    rep["missing_pairs"] = missing
    if len(H) < (lam - eps) * n ** 3:
        rep["status"] = "hypothesis-not-met"
        rep["reason"] = "edge count below (lam - eps) n^3"
        return rep
    gap = Fraction(m - 1, 2 * m) * n * n - sh
    holds = gap <= 0 or gap * gap <= 9 * m * m * n ** 4 * eps
    rep["status"] = "pass" if holds else "fail"
    rep["missing_gate"] = missing < 4 * eps * n * n
    return rep


def _decimal(q: Fraction, places: int = 12) -> str:
    q = Fraction(q)
    scaled = round(q * 10 ** places)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10 ** places)
    return f"{sign}{whole}.{frac:0{places}d}"


def region_csv(points: Iterable[RegionPoint]) -> str:
    lines = [CSV_HEADER]
    for p in points:
        lines.append(f"{_decimal(p.x)},{_decimal(p.y)},{p.family},{'inf' if p.n is None else p.n}")
    return "\n".join(lines) + "\n"


_PLOT = '''"""Plot the region samples next to this file (needs matplotlib)."""
import csv
import sys

import matplotlib.pyplot as plt

VERTICAL = {vertical}
HORIZONTAL = {horizontal}

rows = list(csv.DictReader(open(sys.argv[1] if len(sys.argv) > 1 else {csv_name!r})))
for fam in sorted({{r["family"] for r in rows}}):
    pts = [(float(r["x"]), float(r["y"])) for r in rows if r["family"] == fam]
    plt.scatter(*zip(*pts), s=8, label=fam)
for x in VERTICAL:
    plt.axvline(x, ls=":", c="grey")
for y in HORIZONTAL:
    plt.axhline(y, ls="--", c="grey")
plt.xlim(0, 1)
plt.ylim(0, 1)
plt.xlabel("shadow density")
plt.ylabel("edge density")
plt.legend()
plt.savefig({png_name!r}, dpi=150)
'''


def emit_region(points: Iterable[RegionPoint], path: str | Path, vertical: Sequence = (),
                horizontal: Sequence = ()) -> tuple[Path, Path]:
    """Write the CSV and a plotting stub; returns both paths.

    ``vertical`` and ``horizontal`` are marker positions, typically
    1 - 1/n_i and 6 lambda_t.
    """
    path = Path(path)
    path.write_text(region_csv(points), newline="\n")
    stub = path.with_suffix(".plot.py")
    stub.write_text(_PLOT.format(
        vertical="[" + ", ".join(_decimal(Fraction(x)) for x in vertical) + "]",
        horizontal="[" + ", ".join(_decimal(Fraction(y)) for y in horizontal) + "]",
        csv_name=path.name,
        png_name=path.with_suffix(".png").name,
    ), newline="\n")
    return path, stub


def markers_for(vertex_counts: Sequence[int], lam) -> tuple[list[Fraction], list[Fraction]]:
    return [1 - Fraction(1, v) for v in vertex_counts], [6 * Fraction(lam)]

"""Batch verification and the end-to-end artifact pipeline."""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from math import comb
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import hg3
from .designs import build_design, expand_H
from .errors import HypextError, PreconditionError
from .family import exhaustive_equivalence, find_homomorphism
from .forge import (
    assemble_Gi,
    construct_params,
    lambda_in_interval,
    lambda_t,
    verify_divisibility,
    verify_gap,
    verify_observation,
)
from .hcore import Hypergraph, clique_number, complete, densities, fano, min_max_codegree
from .lagrange import OptimizerConfig, check_concavity_bound, design_lagrangian, evaluate, maximize
from .region import (
    blowup_points,
    blowup_tag,
    complete_semibipartite,
    emit_region,
    markers_for,
    semibipartite_curve,
)
from .symm import find_missing_class_pair, max_colorable_edges, run_symmetrization


def default_seed() -> int:
    return int(os.environ.get("HYPEXT_SEED", "0"))


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    out_dir: Path = Path("verify-out")
    quick: bool = False
    optimizer_tol: float | None = None  # tighten the optimizer gates (negative control)
    fixture: Path | None = None
    jobs: int = 1
    node_budget: int = 2_000_000
    vertex_cap: int = 5000


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, Fraction):
        return f"{o.numerator}/{o.denominator}"
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def sha256_bytes(b: bytes) -> str:
    return hashlib.sha256(b).hexdigest()


# ---------------------------------------------------------------------------
# acceptance checks; each returns a JSON-able dict with a boolean "passed"


def rounding_allowance(n: int, value: float) -> float:
    """Forward-error scale n * eps * |value| of a float sum over n coordinates.

    A float result only certifies agreement down to this size, so a check
    passes when error + allowance fits inside the tolerance.
    """
    return n * float(np.finfo(float).eps) * abs(value)


def check_fano(cfg: RunConfig) -> dict:
    tol = 1e-9 if cfg.optimizer_tol is None else cfg.optimizer_tol
    F = fano()
    t = time.perf_counter()
    rep = maximize(F, OptimizerConfig(seed=cfg.seed))
    dt = time.perf_counter() - t
    err = abs(rep.best_value - 1 / 27)
    uni = evaluate(F, [Fraction(1, 7)] * 7)
    slack = rounding_allowance(7, rep.best_value)
    return {"passed": err + slack <= tol and uni == Fraction(1, 49) and dt < 1.0,
            "error": err, "allowance": slack, "tolerance": tol, "uniform_value": uni, "under_1s": dt < 1.0}


def check_design_lagrangian(cfg: RunConfig) -> dict:
    tol_v = 1e-8 if cfg.optimizer_tol is None else cfg.optimizer_tol
    tol_d = 1e-5 if cfg.optimizer_tol is None else cfg.optimizer_tol
    n, k, s = 57, 3, 0
    A = assemble_Gi(n, k, s, seed=cfg.seed)
    form = A.form()
    opt = OptimizerConfig(seed=cfg.seed, starts=8 if cfg.quick else 32)
    rep = maximize(form, opt)
    exact = design_lagrangian(n, k, s)
    err = abs(rep.best_value - float(exact))
    dist = rep.best_point.distance_to_uniform()
    samples = 1000 if cfg.quick else 10_000
    conc = check_concavity_bound(form, n, k, s, sample_count=samples, seed=cfg.seed)
    slack = rounding_allowance(n, rep.best_value)
    return {"passed": err + slack <= tol_v and dist <= tol_d and conc.violations == 0 and conc.max_excess <= 1e-12,
            "value_error": err, "allowance": slack, "tolerance": tol_v, "distance_to_uniform": dist, "samples": samples,
            "max_excess": conc.max_excess, "violations": conc.violations, "exact": exact}


def brute_force_Q(k: int, C: int) -> int:
    Q = max(2, C + (C % 2))
    while (Q - k * k // 2) % (k * (k - 1)):
        Q += 2
    return Q


def check_arithmetic(cfg: RunConfig) -> dict:
    out = {}
    ok = True
    for t in (1, 2, 3):
        P = construct_params(t, 3, 1)
        rep = verify_divisibility(P)
        ok &= rep.ok and verify_gap(P)
        out[f"t={t}"] = {"Q": P.Q, "ok": rep.ok, "gap": verify_gap(P)}
    P = construct_params(1, 3, 1)
    bf = brute_force_Q(P.k[0], 1)
    n1 = 7 * P.Q
    div = n1 % 3 == 0 and (n1 - 1) % 5 == 0 and n1 * (n1 - 1) % 30 == 0
    ok &= bf == P.Q and P.n[0] == n1 and div
    out.update({"brute_force_Q": bf, "n1": n1, "n1_divisibility": div})
    return {"passed": ok, **out}


def check_designs(cfg: RunConfig) -> dict:
    rows = {}
    ok = True
    for n, k in [(7, 3), (9, 3), (13, 3), (15, 3), (57, 3), (13, 4)]:
        D = build_design(n, k)
        HD = expand_H(D)
        good = D.verify() and len(HD) * 6 == (k - 2) * n * (n - 1)
        ok &= good
        rows[f"{n},{k}"] = {"method": D.method, "blocks": len(D.blocks), "H_D": len(HD), "ok": good}
    return {"passed": ok, "designs": rows}


def check_assembly(cfg: RunConfig) -> dict:
    A = assemble_Gi(57, 3, 0, seed=cfg.seed)
    G = A.G
    degs = set(G.degrees)
    lo, hi = min_max_codegree(G)
    omegas = {clique_number(Hypergraph(2, 57, G.links[v]), [u for u in range(57) if u != v]) for v in range(57)}
    B = assemble_Gi(57, 3, 1, seed=cfg.seed)
    degs1 = set(B.G.degrees)
    lo1, hi1 = min_max_codegree(B.G)
    ok = len(degs) == 1 and lo == hi == 54 and omegas == {28} and len(degs1) == 1 and 52 <= lo1 and hi1 <= 54
    return {"passed": ok, "s0": {"degrees": sorted(degs), "codegree": [lo, hi], "clique": sorted(omegas)},
            "s1": {"degrees": sorted(degs1), "codegree": [lo1, hi1]}}


def check_lambda_identity(cfg: RunConfig) -> dict:
    ok = True
    rows = []
    for t in (1, 2, 3):
        P = construct_params(t, 3, 1)
        for k in P.k:
            eq = design_lagrangian(P.Q * (k + 1), k, k // 2) == lambda_t(P.Q)
            ok &= eq and lambda_in_interval(P.Q)
            rows.append({"t": t, "k": k, "Q": P.Q, "equal": eq})
    interval = all(lambda_in_interval(Q) == (Q >= 16) for Q in range(1, 500))
    ok &= interval
    return {"passed": ok, "rows": rows, "interval_exactly_Q_ge_16": interval}


def check_symmetrization(cfg: RunConfig) -> dict:
    rng = np.random.default_rng(cfg.seed)
    count = 60 if cfg.quick else 500
    outcomes: dict[str, int] = {}
    bad = []
    hom_checked = 0
    for i in range(count):
        n = int(rng.integers(3, 10))
        p = float(rng.random())
        edges = [e for e in _triples(n) if rng.random() < p]
        H = Hypergraph(3, n, edges)
        tr = run_symmetrization(H, keep_graphs=True)
        outcomes[tr.outcome] = outcomes.get(tr.outcome, 0) + 1
        good = tr.is_strictly_increasing() and find_missing_class_pair(tr.final) is None
        if n <= 7:
            for a, b in zip(tr.graphs, tr.graphs[1:]):
                hom_checked += 1
                good &= find_homomorphism(b, a) is not None
        if not good:
            bad.append(i)
    return {"passed": not bad, "graphs": count, "failures": bad, "outcomes": outcomes, "hom_steps_checked": hom_checked}


def _triples(n: int):
    return [(a, b, c) for a in range(n) for b in range(a + 1, n) for c in range(b + 1, n)]


def check_mfrak(cfg: RunConfig) -> dict:
    K4 = complete(4)
    r8 = max_colorable_edges([K4], 8)
    ok = r8.value == 32 and r8.exact
    mult = {}
    for n in (4, 8, 12, 16, 20):
        v = max_colorable_edges([K4], n).value
        mult[n] = v
        ok &= v * 16 == n ** 3
    lower = {}
    for n in (8, 12, 16):
        v = max_colorable_edges([K4], n).value
        lower[n] = v >= 6 * Fraction(1, 16) * comb(n, 3)
        ok &= lower[n]
    return {"passed": ok, "n8": r8.value, "sizes8": list(r8.sizes), "multiples_of_4": mult, "lower_bound": lower}


TOY_FREE_FAMILY = "K4,Fano"
TOY_FREE_NT = 7
TOY_REGION = ((54, 2, 1), (126, 6, 3))
TOY_REGION_Q = 18


def check_freeness(cfg: RunConfig) -> dict:
    n = 5 if cfg.quick else 6
    rep = exhaustive_equivalence([complete(4), fano()], TOY_FREE_NT, n=n)
    return {"passed": rep.ok, "vertices": n, "classes": rep.samples, "discrepancies": len(rep.discrepancies),
            "indeterminate": rep.indeterminate, "members": rep.members_used}


def region_points(toys, multiples=range(1, 6), semi_n=(10, 30, 60), alphas=(Fraction(1, 10), Fraction(1, 3), Fraction(1, 2)),
                  seed: int = 0):
    pts = []
    Gs = []
    for i, (n, k, s) in enumerate(toys, start=1):
        G = assemble_Gi(n, k, s, seed=seed).G
        Gs.append(G)
        pts.extend(blowup_points(G, multiples, blowup_tag(i)))
    for n in semi_n:
        pts.extend(semibipartite_curve(n, alphas))
    return pts, Gs


def check_region(cfg: RunConfig) -> dict:
    lam = lambda_t(TOY_REGION_Q)
    pts, Gs = region_points(TOY_REGION, multiples=range(1, 4), seed=cfg.seed)
    path = Path(cfg.out_dir) / "region.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    emit_region(pts, path, *markers_for([G.n for G in Gs], lam))
    ok = True
    limits = {}
    for i, G in enumerate(Gs, start=1):
        row = [p for p in pts if p.family == blowup_tag(i) and p.n is None][0]
        limits[i] = {"x": row.x, "y": row.y}
        ok &= row.y == 6 * lam and row.x == 1 - Fraction(1, G.n)
    semi_ok = True
    for p in pts:
        if p.family != "semibipartite":
            continue
        a = next(a for a in range(1, p.n - 1) if (1 - Fraction(comb(a, 2), comb(p.n, 2))) == p.x)
        semi_ok &= densities(complete_semibipartite(p.n, a)) == (p.x, p.y)
        semi_ok &= p.y * comb(p.n, 3) * 27 <= 2 * p.n ** 3
    ok &= semi_ok
    return {"passed": ok, "limits": limits, "semibipartite_ok": semi_ok, "points": len(pts),
            "csv_sha256": sha256_bytes(path.read_bytes())}


def check_fixture(cfg: RunConfig) -> dict:
    if cfg.fixture is None:
        path = Path(cfg.out_dir) / "fixture.hg3"
        path.parent.mkdir(parents=True, exist_ok=True)
        hg3.write(fano(), path)
    else:
        path = Path(cfg.fixture)
    try:
        H = hg3.read(path)
    except (HypextError, OSError) as exc:
        return {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
    return {"passed": hg3.loads(hg3.dumps(H)) == H, "edges": len(H)}


CHECKS: list[tuple[str, Callable[[RunConfig], dict]]] = [
    ("1-fano-lagrangian", check_fano),
    ("2-design-lagrangian", check_design_lagrangian),
    ("3-arithmetic", check_arithmetic),
    ("4-designs", check_designs),
    ("5-assembly", check_assembly),
    ("6-lambda-identity", check_lambda_identity),
    ("7-symmetrization", check_symmetrization),
    ("8-mfrak", check_mfrak),
    ("9-freeness", check_freeness),
    ("10-region", check_region),
    ("hg3-fixture", check_fixture),
]


def _run_one(name: str, fn, cfg: RunConfig) -> tuple[dict, float]:
    t = time.perf_counter()
    try:
        res = fn(cfg)
    except Exception as exc:  # collected per check, never short-circuits the batch
        res = {"passed": False, "error": f"{type(exc).__name__}: {exc}"}
    return res, time.perf_counter() - t


def verify_all(cfg: RunConfig, only: Sequence[str] | None = None) -> tuple[int, dict]:
    """Run every acceptance check; write summary.json and manifest.json.

    The summary carries timings.  The manifest holds only content hashes of
    each check's result and is byte-identical for a fixed configuration.
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    todo = [(n, f) for n, f in CHECKS if only is None or n in only]
    with ThreadPoolExecutor(max_workers=max(1, cfg.jobs)) as ex:
        futs = [ex.submit(_run_one, n, f, cfg) for n, f in todo]
        results = [f.result() for f in futs]
    summary = {"seed": cfg.seed, "quick": cfg.quick, "checks": []}
    manifest = {"seed": cfg.seed, "quick": cfg.quick, "optimizer_tol": cfg.optimizer_tol, "checks": {}}
    for (name, _), (res, dt) in zip(todo, results):
        body = canonical_json(res)
        summary["checks"].append({"name": name, "passed": bool(res["passed"]), "seconds": round(dt, 3),
                                  "detail": json.loads(body)})
        manifest["checks"][name] = {"passed": bool(res["passed"]), "sha256": sha256_bytes(body.encode())}
    summary["all_passed"] = all(c["passed"] for c in summary["checks"])
    (out / "summary.json").write_text(canonical_json(summary))
    (out / "manifest.json").write_text(canonical_json(manifest))
    return (0 if summary["all_passed"] else 1), summary


# ---------------------------------------------------------------------------
# artifact pipeline


def pipeline(t: int, q: int, C: int, toys: Sequence[tuple[int, int, int]], out_dir: str | Path,
             seed: int = 0, multiples: Sequence[int] = range(1, 6)) -> dict:
    """Parameters, toy G_i files, observation reports and region data with a hashed manifest."""
    if q < 1:
        raise PreconditionError("q must be positive")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    P = construct_params(t, q, C)
    files: dict[str, Path] = {}

    def put(name: str, text: str) -> None:
        p = out / name
        p.write_text(text, newline="\n")
        files[name] = p

    put("params.json", canonical_json(P.to_json()))
    div = verify_divisibility(P)
    div.record("link_gap", verify_gap(P))
    put("divisibility.json", canonical_json(div.to_json()))
    Gs = []
    for i, (n, k, s) in enumerate(toys, start=1):
        A = assemble_Gi(n, k, s, seed=seed)
        Gs.append(A.G)
        put(f"G_{i}.hg3", hg3.dumps(A.G))
        obs = verify_observation(A)
        put(f"observation_{i}.json", canonical_json({"assembly": A.report(), "observation": obs.to_json()}))
    if Gs:
        pts = []
        for i, G in enumerate(Gs, start=1):
            pts.extend(blowup_points(G, multiples, blowup_tag(i)))
        for n in (10, 30, 60):
            pts.extend(semibipartite_curve(n, (Fraction(1, 10), Fraction(1, 3), Fraction(1, 2))))
        csv_path, stub = emit_region(pts, out / "region.csv", *markers_for([G.n for G in Gs], P.lambda_t))
        files["region.csv"] = csv_path
        files[stub.name] = stub
    _round_trip(files)
    manifest = {"inputs": {"t": t, "q": q, "C": C, "toys": [list(x) for x in toys], "seed": seed},
                "files": {name: sha256_bytes(p.read_bytes()) for name, p in sorted(files.items())}}
    (out / "manifest.json").write_text(canonical_json(manifest))
    return manifest


def _round_trip(files: dict[str, Path]) -> None:
    for name, p in files.items():
        text = p.read_text()
        if name.endswith(".hg3"):
            if hg3.dumps(hg3.loads(text)) != text:
                raise HypextError(f"{name} does not round-trip")
        elif name.endswith(".json"):
            if canonical_json(json.loads(text)) != text:
                raise HypextError(f"{name} does not round-trip")
        elif name.endswith(".csv"):
            rows = text.splitlines()
            if rows[0] != "x,y,family,n" or any(len(r.split(",")) != 4 for r in rows):
                raise HypextError(f"{name} is malformed")


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})

"""Command-line front end: ``hypext <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import hg3
from .designs import build_design, build_regular_3graph, pack
from .errors import HypextError
from .family import is_Mt_free
from .forge import FamilyParams, assemble_Gi, construct_params, verify_divisibility, verify_gap, verify_observation
from .hcore import Hypergraph
from .lagrange import OptimizerConfig, design_lagrangian, maximize
from .pipeline import RunConfig, canonical_json, default_seed, pipeline, verify_all
from .region import blowup_points, blowup_tag, emit_region, markers_for, semibipartite_curve
from .symm import max_colorable_edges, run_symmetrization


def _emit(obj, out: str | None) -> None:
    text = canonical_json(obj)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_dir(d: str) -> list[Hypergraph]:
    paths = sorted(Path(d).glob("*.hg3"))
    if not paths:
        raise HypextError(f"no .hg3 files in {d}")
    return [hg3.read(p) for p in paths]


def _triple(text: str) -> tuple[int, int, int]:
    try:
        n, k, s = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected n,k,s got {text!r}") from None
    return n, k, s


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def cmd_construct_params(a) -> int:
    P = construct_params(a.t, a.q, a.C, a.s1)
    rep = verify_divisibility(P)
    rep.record("link_gap", verify_gap(P))
    if a.out:
        Path(a.out).write_text(canonical_json(P.to_json()))
    _emit({"params": P.to_json(), "divisibility": rep.to_json()}, None)
    return 0 if rep.ok else 1


def cmd_build_design(a) -> int:
    D = build_design(a.n, a.k, a.budget)
    if a.out:
        hg3.write(D.blocks, a.out)
    print(json.dumps({"n": D.n, "k": D.k, "blocks": len(D.blocks), "method": D.method, "verified": D.verify()}))
    return 0


def cmd_build_regular(a) -> int:
    S = build_regular_3graph(a.n, a.s, a.seed)
    if a.out:
        hg3.write(S, a.out)
    print(json.dumps({"n": S.n, "edges": len(S), "degree": S.degrees[0] if S.n else 0}))
    return 0


def cmd_pack(a) -> int:
    w = pack(hg3.read(a.input), hg3.read(a.forbidden), seed=a.seed, budget=a.budget)
    _emit({"phi": list(w.phi), "verified": w.verified, "attempts": w.attempts,
           "condition_held": w.condition_held}, a.out)
    return 0


def cmd_build_gi(a) -> int:
    A = assemble_Gi(a.n, a.k, a.s, seed=a.seed)
    if a.out:
        hg3.write(A.G, a.out)
    rep = verify_observation(A)
    _emit({"assembly": A.report(), "observation": rep.to_json()}, a.report)
    return 0 if rep.ok else 1


def cmd_lagrangian(a) -> int:
    cfg = OptimizerConfig(starts=a.starts, tol=a.tol, seed=a.seed)
    if a.design:
        n, k, s = a.design
        A = assemble_Gi(n, k, s, seed=a.seed)
        rep = maximize(A.form(), cfg)
        out = rep.to_json()
        out["closed_form"] = design_lagrangian(n, k, s)
        out["closed_form_float"] = float(out["closed_form"])
    else:
        rep = maximize(hg3.read(a.input), cfg)
        out = rep.to_json()
    _emit(out, a.out)
    return 0


def cmd_check_free(a) -> int:
    res = is_Mt_free(hg3.read(a.input), _read_dir(a.gis), a.n_t, a.budget)
    _emit(res.to_json(), a.out)
    return 0 if res.free else (1 if res.free is False else 2)


def cmd_symmetrize(a) -> int:
    H = hg3.read(a.input)
    gis = _read_dir(a.gis) if a.gis else None
    tr = run_symmetrization(H, gis, a.n_t, mode=a.mode, budget=a.budget)
    _emit(tr.to_json(), a.trace)
    return 0


def cmd_mfrak(a) -> int:
    r = max_colorable_edges(_read_dir(a.gis), a.n, a.budget)
    _emit({"n": a.n, "value": r.value, "config": r.config, "sizes": list(r.sizes),
           "exact": r.exact, "flag": "exact" if r.exact else "local"}, a.out)
    return 0


def cmd_feasible_region(a) -> int:
    P = FamilyParams.from_json(json.loads(Path(a.family).read_text())) if a.family else None
    pts = []
    Gs = _read_dir(a.toy_gis) if a.toy_gis else []
    for i, G in enumerate(Gs, start=1):
        pts.extend(blowup_points(G, range(1, a.multiples + 1), blowup_tag(i)))
    for n in a.semibipartite_n:
        pts.extend(semibipartite_curve(n, (Fraction(1, 10), Fraction(1, 3), Fraction(1, 2))))
    vert, horiz = markers_for([G.n for G in Gs], P.lambda_t) if P else ([], [])
    csv_path, stub = emit_region(pts, a.out, vert, horiz)
    print(json.dumps({"points": len(pts), "csv": str(csv_path), "plot": str(stub)}))
    return 0


def cmd_verify_all(a) -> int:
    cfg = RunConfig(seed=a.seed, out_dir=Path(a.out), quick=a.quick, optimizer_tol=a.tol,
                    fixture=Path(a.fixture) if a.fixture else None, jobs=a.jobs)
    code, summary = verify_all(cfg)
    for c in summary["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']} ({c['seconds']:.2f}s)")
    return code


def cmd_pipeline(a) -> int:
    m = pipeline(a.t, a.q, a.C, a.toy or [], a.out, seed=a.seed)
    print(canonical_json(m), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    seed = default_seed()
    p = argparse.ArgumentParser(prog="hypext", description="Hypergraph extremal constructions toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--seed", type=int, default=seed, help="random seed (default from HYPEXT_SEED)")
        return sp

    sp = add("construct-params", cmd_construct_params, "derive s, k, Q, n and lambda_t")
    sp.add_argument("--t", type=_positive, required=True)
    sp.add_argument("--q", type=_positive, required=True)
    sp.add_argument("--C", type=_positive, default=1)
    sp.add_argument("--s1", type=_positive)
    sp.add_argument("--out")

    sp = add("build-design", cmd_build_design, "build and verify an (n,k)-design")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--k", type=_positive, required=True)
    sp.add_argument("--budget", type=int, default=1_000_000)
    sp.add_argument("--out")

    sp = add("build-regular", cmd_build_regular, "build an s-regular 3-graph on n vertices")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--out")

    sp = add("pack", cmd_pack, "pack a 3-graph into the complement of another")
    sp.add_argument("--input", required=True)
    sp.add_argument("--forbidden", required=True)
    sp.add_argument("--budget", type=int, default=200_000)
    sp.add_argument("--out")

    sp = add("build-gi", cmd_build_gi, "assemble a toy G from (n,k,s) and check its structure")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--k", type=_positive, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--out")
    sp.add_argument("--report")

    sp = add("lagrangian", cmd_lagrangian, "maximize the Lagrangian")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--input")
    g.add_argument("--design", type=_triple, metavar="N,K,S")
    sp.add_argument("--starts", type=_positive, default=32)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--out")

    sp = add("check-free", cmd_check_free, "decide freeness against a family given by configurations")
    sp.add_argument("--input", required=True)
    sp.add_argument("--gis", required=True, help="directory of .hg3 configurations")
    sp.add_argument("--n-t", type=_positive, required=True)
    sp.add_argument("--budget", type=int, default=2_000_000)
    sp.add_argument("--out")

    sp = add("symmetrize", cmd_symmetrize, "run symmetrization and certify the terminal graph")
    sp.add_argument("--input", required=True)
    sp.add_argument("--mode", choices=("vertex", "class"), default="vertex")
    sp.add_argument("--gis")
    sp.add_argument("--n-t", type=_positive)
    sp.add_argument("--budget", type=int, default=2_000_000)
    sp.add_argument("--trace")

    sp = add("mfrak", cmd_mfrak, "largest colourable 3-graph on n vertices")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--gis", required=True)
    sp.add_argument("--budget", type=int, default=2_000_000)
    sp.add_argument("--out")

    sp = add("feasible-region", cmd_feasible_region, "emit density points and a plot stub")
    sp.add_argument("--family", help="params JSON from construct-params --out")
    sp.add_argument("--toy-gis")
    sp.add_argument("--multiples", type=_positive, default=5)
    sp.add_argument("--semibipartite-n", type=_positive, nargs="*", default=[10, 30, 60])
    sp.add_argument("--out", required=True)

    sp = add("verify-all", cmd_verify_all, "run the acceptance checks")
    sp.add_argument("--out", default="verify-out")
    sp.add_argument("--quick", action="store_true")
    sp.add_argument("--tol", type=float, help="override optimizer tolerances")
    sp.add_argument("--fixture", help=".hg3 file for the parser check")
    sp.add_argument("--jobs", type=_positive, default=1)

    sp = add("pipeline", cmd_pipeline, "params, toy graphs, reports and region data with a manifest")
    sp.add_argument("--t", type=_positive, required=True)
    sp.add_argument("--q", type=_positive, required=True)
    sp.add_argument("--C", type=_positive, default=1)
    sp.add_argument("--toy", type=_triple, action="append", metavar="N,K,S")
    sp.add_argument("--out", required=True)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HypextError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

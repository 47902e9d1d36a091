import json
from pathlib import Path

import pytest

from hypext import hg3
from hypext.cli import build_parser, main
from hypext.hcore import Hypergraph, complete, fano, star
from hypext.pipeline import RunConfig, verify_all


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    out = capsys.readouterr().out
    for cmd in ("construct-params", "build-design", "build-regular", "pack", "build-gi", "lagrangian",
                "check-free", "symmetrize", "mfrak", "feasible-region", "verify-all", "pipeline"):
        assert cmd in out


def test_seed_from_env(monkeypatch):
    monkeypatch.setenv("HYPEXT_SEED", "41")
    args = build_parser().parse_args(["build-regular", "--n", "9", "--s", "2"])
    assert args.seed == 41


def test_construct_params(tmp_path, capsys):
    code, out = run(capsys, "construct-params", "--t", "2", "--q", "3", "--C", "1", "--out", str(tmp_path / "p.json"))
    assert code == 0
    assert json.loads(out)["params"]["Q"] == 8448
    assert json.loads((tmp_path / "p.json").read_text())["lambda_t"] == "8447/50688"


def test_invalid_q(capsys):
    with pytest.raises(SystemExit):
        main(["construct-params", "--t", "1", "--q", "0"])


def test_design_regular_pack(tmp_path, capsys):
    d = tmp_path / "d.hg3"
    code, out = run(capsys, "build-design", "--n", "15", "--k", "3", "--out", str(d))
    assert code == 0 and json.loads(out)["blocks"] == 35
    s = tmp_path / "s.hg3"
    code, out = run(capsys, "build-regular", "--n", "15", "--s", "1", "--out", str(s))
    assert json.loads(out)["degree"] == 1
    code, out = run(capsys, "pack", "--input", str(s), "--forbidden", str(d))
    phi = json.loads(out)["phi"]
    S = hg3.read(s)
    img = {tuple(sorted(phi[v] for v in e)) for e in S.edges}
    assert not img & hg3.read(d).edge_set


def test_build_gi_and_lagrangian(tmp_path, capsys):
    g = tmp_path / "g.hg3"
    code, out = run(capsys, "build-gi", "--n", "57", "--k", "3", "--s", "0", "--out", str(g))
    assert code == 0 and json.loads(out)["observation"]["ok"]
    assert len(hg3.read(g)) == 28728
    hg3.write(fano(), tmp_path / "f.hg3")
    code, out = run(capsys, "lagrangian", "--input", str(tmp_path / "f.hg3"))
    assert abs(json.loads(out)["best_value"] - 1 / 27) <= 1e-9
    code, out = run(capsys, "lagrangian", "--design", "57,3,0", "--starts", "4")
    d = json.loads(out)
    assert abs(d["best_value"] - d["closed_form_float"]) <= 1e-8


@pytest.fixture
def gis(tmp_path):
    d = tmp_path / "gis"
    d.mkdir()
    hg3.write(complete(4), d / "G_1.hg3")
    hg3.write(fano(), d / "G_2.hg3")
    return d


def test_check_free_and_symmetrize(tmp_path, capsys, gis):
    hg3.write(complete(5), tmp_path / "k5.hg3")
    code, out = run(capsys, "check-free", "--input", str(tmp_path / "k5.hg3"), "--gis", str(gis), "--n-t", "7")
    assert code == 1 and json.loads(out)["free"] is False
    hg3.write(star(6), tmp_path / "s.hg3")
    code, out = run(capsys, "check-free", "--input", str(tmp_path / "s.hg3"), "--gis", str(gis), "--n-t", "7")
    assert code == 0
    two = Hypergraph(3, 6, [(0, 1, 2), (3, 4, 5)])
    hg3.write(two, tmp_path / "two.hg3")
    trace = tmp_path / "t.json"
    code, _ = run(capsys, "symmetrize", "--input", str(tmp_path / "two.hg3"), "--mode", "vertex", "--trace", str(trace),
                  "--gis", str(gis), "--n-t", "7")
    t = json.loads(trace.read_text())
    assert code == 0 and t["outcome"] == "semibipartite"


def test_mfrak(capsys, gis):
    code, out = run(capsys, "mfrak", "--n", "8", "--gis", str(gis))
    d = json.loads(out)
    assert d["value"] == 32 and d["flag"] == "exact"


def test_feasible_region(tmp_path, capsys, gis):
    run(capsys, "construct-params", "--t", "1", "--q", "3", "--out", str(tmp_path / "p.json"))
    out_csv = tmp_path / "region.csv"
    code, out = run(capsys, "feasible-region", "--family", str(tmp_path / "p.json"), "--toy-gis", str(gis),
                    "--out", str(out_csv))
    assert code == 0 and out_csv.read_text().startswith("x,y,family,n\n")
    assert "HORIZONTAL = [0.944444444444]" in (tmp_path / "region.plot.py").read_text()


def test_pipeline_bundle(tmp_path, capsys):
    code, out = run(capsys, "pipeline", "--t", "1", "--q", "3", "--C", "1", "--toy", "57,3,0", "--out", str(tmp_path / "b"))
    m = json.loads(out)
    assert set(m["files"]) == {"params.json", "divisibility.json", "G_1.hg3", "observation_1.json",
                               "region.csv", "region.plot.py"}
    assert len(hg3.read(tmp_path / "b" / "G_1.hg3")) == 28728
    code, out2 = run(capsys, "pipeline", "--t", "1", "--q", "3", "--C", "1", "--toy", "57,3,0", "--out", str(tmp_path / "c"))
    assert json.loads(out2)["files"] == m["files"]


def test_pipeline_arithmetic_only(tmp_path, capsys):
    code, out = run(capsys, "pipeline", "--t", "3", "--q", "3", "--out", str(tmp_path / "b"))
    assert set(json.loads(out)["files"]) == {"params.json", "divisibility.json"}
    assert json.loads((tmp_path / "b" / "divisibility.json").read_text())["ok"]


def test_verify_all_corrupted_fixture(tmp_path):
    bad = tmp_path / "bad.hg3"
    bad.write_text("3 4 1\n0 2 1\n")
    code, summary = verify_all(RunConfig(out_dir=tmp_path / "v", quick=True, fixture=bad))
    failed = [c["name"] for c in summary["checks"] if not c["passed"]]
    assert code == 1 and failed == ["hg3-fixture"]
    assert "HG3FormatError" in summary["checks"][-1]["detail"]["error"]


def test_verify_all_negative_control(tmp_path, capsys):
    code, out = run(capsys, "verify-all", "--quick", "--tol", "1e-15", "--out", str(tmp_path / "v"))
    assert code == 1
    assert "FAIL 2-design-lagrangian" in out

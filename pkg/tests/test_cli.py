import io
import json
import subprocess
import sys

import pytest

from finitedr.cli import main, parse_g, parse_r1, read_config, ConfigError
from finitedr.diffpoly import DiffPoly, TruncationContext
from finitedr.drcycle import Q_COEFFS
from finitedr.fcohft import FamilySpec
from finitedr.hierarchy import golden_P110
from finitedr.params import ParamRational


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_flows_p21_zero(capsys):
    code, out, _ = run(capsys, "flows", "--alpha", "2", "--beta", "1", "--d", "0")
    assert code == 0
    entry = json.loads(out)["entries"][0]
    assert entry["P"]["terms"] == [] and entry["dxP"]["terms"] == []


def test_flows_p110_matches_closed_form(capsys):
    code, out, _ = run(capsys, "flows", "--alpha", "1", "--beta", "1", "--Dmax", "4", "--Emax", "2")
    assert code == 0
    got = DiffPoly.from_json(json.loads(out)["entries"][0]["P"])
    ctx = TruncationContext(2, 4, 2)
    assert got == golden_P110(FamilySpec.rank2(), ctx)


def test_flows_miura(capsys):
    code, out, _ = run(capsys, "flows", "--beta", "2", "--miura", "--Dmax", "3", "--Emax", "2")
    assert code == 0
    entries = {(e["alpha"], e["beta"]): DiffPoly.from_json(e["flow"]) for e in json.loads(out)["entries"]}
    assert entries[(2, 2)] == DiffPoly.var(TruncationContext(2, 3, 2), 2, 1)


def test_numeric_parameters_and_text(capsys):
    code, out, _ = run(capsys, "flows", "--alpha", "1", "--xi", "1/2", "--G", "1,G", "--Dmax", "2", "--Emax", "2",
                       "--format", "text")
    assert code == 0
    assert out.splitlines()[0] == "P^1_1,0 = u1 - 1/2*u1*u2 + 1/4*u2^2 + (-1/48 + 1/48*G2)*eps^2*u2_xx + (1/32 - 1/96*G2)*eps^2*u2*u2_xx + 1/48*eps^2*u2_x^2"


def test_deterministic_output(capsys):
    args = ("flows", "--alpha", "1", "--beta", "2", "--Dmax", "3", "--Emax", "4")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# rank-2 spot check\nalpha = 1\nDmax = 2\nEmax = 2\nxi = 1/2\nformat = text\n")
    _, from_file, _ = run(capsys, "flows", "--config", str(cfg))
    assert from_file.startswith("P^1_1,0 = u1 - 1/2*u1*u2")
    _, overridden, _ = run(capsys, "flows", "--config", str(cfg), "--xi", "1")
    assert overridden.startswith("P^1_1,0 = u1 - u1*u2")


def test_config_errors(tmp_path, capsys):
    assert run(capsys, "flows", "--R1", "2,1=1")[0] == 2
    assert run(capsys, "flows", "--rank", "3", "--R1", "1,2=1;2,3=1")[0] == 2
    assert run(capsys, "flows", "--xi", "1", "--R1", "1,2=1")[0] == 2
    assert run(capsys, "flows", "--G", "1")[0] == 2
    assert run(capsys, "flows", "--Dmax", "-1")[0] == 2
    assert run(capsys, "flows", "--rank", "3", "--miura")[0] == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour=blue\n")
    code, _, err = run(capsys, "flows", "--config", str(bad))
    assert code == 2 and json.loads(err)["error"] == "ConfigError"
    with pytest.raises(SystemExit) as info:
        main(["verify", "nonsense"])
    assert info.value.code == 2


def test_unsupported_pattern_exit(capsys):
    code, out, _ = run(capsys, "flows", "--rank", "1", "--G", "1", "--d", "3", "--Dmax", "3", "--Emax", "6")
    assert code == 3
    diag = json.loads(out)
    assert diag["error"] == "UnsupportedPattern" and diag["query"]["genus"] == 3
    assert "tree" in diag["context"]


def test_trees_families(capsys):
    _, out, _ = run(capsys, "trees", "--alpha", "1", "--beta", "1")
    assert json.loads(out)["total"] == 4
    _, out, _ = run(capsys, "trees", "--alpha", "1", "--beta", "2", "--g", "1")
    assert json.loads(out)["total"] == 9
    _, out, _ = run(capsys, "trees", "--alpha", "2", "--beta", "2", "--n", "1")
    data = json.loads(out)
    assert data["count"] and all(len(t["tree"]["vertices"]) == 1 for t in data["trees"])


def test_trees_dump_has_weights(capsys):
    _, out, _ = run(capsys, "trees", "--alpha", "1", "--beta", "2", "--vectors", "2,2", "--g", "0")
    trees = json.loads(out)["trees"]
    assert trees and all(t["tree"]["weight"] for t in trees)
    assert all("multiplicity" in e for t in trees for e in t["tree"]["edges"])


def test_kdv_command(capsys):
    code, out, _ = run(capsys, "kdv", "--d", "1", "--format", "text")
    assert code == 0 and out.strip() == "P_1 = 1/2*u1^2 + 1/12*eps^2*u1_xx"


def test_oracle_command(tmp_path, capsys, monkeypatch):
    query = {"genus": 1, "points": [{"mult": [-1, -1], "psi": 0}, {"mult": [0, 0], "psi": 0},
                                    {"mult": [1, 0], "psi": 1}, {"mult": [0, 1], "psi": 1}]}
    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(query)))
    code, out, _ = run(capsys, "oracle")
    assert code == 0 and json.loads(out)["msym"] == "1/8*m(2) + 1/6*m(1,1)"
    path = tmp_path / "q.json"
    path.write_text(json.dumps([{"genus": 3, "points": [{"mult": [-1], "psi": 0}, {"mult": [0], "psi": 3},
                                                         {"mult": [1], "psi": 0}]}]))
    assert run(capsys, "oracle", "--input", str(path))[0] == 3
    path.write_text("{not json")
    assert run(capsys, "oracle", "--input", str(path))[0] == 2


def test_verify_pass_and_negative_control(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "kdv")
    report = json.loads(out)
    assert code == 0 and report["suite"] == "kdv"
    assert all(set(c) >= {"name", "status"} for c in report["checks"])
    table = {",".join(map(str, k)): f"{v.numerator}/{v.denominator}" for k, v in Q_COEFFS.items()}
    table["2,2"] = "1/100"
    path = tmp_path / "q.json"
    path.write_text(json.dumps(table))
    code, out, _ = run(capsys, "verify", "all", "--q-table", str(path))
    failed = [c["name"] for c in json.loads(out)["checks"] if c["status"] == "fail"]
    assert code == 1
    assert "theorem-n2: P^1_2,0 tree contributions" in failed


def test_parsers():
    r1 = parse_r1("1,2=-3/2*xi; 1,3=2", 3)
    assert r1[(1, 2)] == ParamRational.xi(3) * -3 / 2
    assert r1[(1, 3)] == ParamRational.const(3, 2)
    assert parse_g("symbolic", 2) is None
    with pytest.raises(ConfigError):
        parse_r1("1;2=3", 2)
    with pytest.raises(ConfigError):
        parse_g("1,x", 2)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "finitedr", "kdv", "--d", "0", "--format", "text"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.strip() == "P_0 = u1"

import json

import pytest

from aitrust.cli import run_cli


@pytest.fixture(autouse=True)
def _env(monkeypatch):
    monkeypatch.setenv("NO_COLOR", "1")
    monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)


def run(capsys, *argv):
    code = run_cli(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_trustrank_zero_pattern(capsys):
    code, out, _ = run(capsys, "trustrank", "--scenario", "robustness-topdown", "--seeds", "A3,A4", "--format", "csv")
    assert code == 0
    rows = dict(line.split(",") for line in out.splitlines()[1:])
    zeros = {k for k, v in rows.items() if v == "0.0000"}
    assert zeros == {"A1", "A2", "M1", "M3", "M4", "M5", "M6"}


def test_assess_json(capsys):
    code, out, _ = run(capsys, "assess", "--scenario", "transparency-bottomup", "--seeds", "M3,M4,M5", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["classifications"]) == 14
    assert doc["timestamp"] is None


def test_byte_reproducible(capsys, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    args = ("assess", "--scenario", "robustness-topdown", "--seeds", "A1,A3")
    first = run(capsys, *args)
    second = run(capsys, *args)
    assert first == second
    assert json.loads(first[1])["timestamp"].startswith("2023-11-14")


def test_validate_bottom_up_violation(capsys, tmp_path):
    f = tmp_path / "g.graph"
    f.write_text("orientation: bottom-up\n[nodes]\nA1 aspect\nM1 component\n[edges]\nA1 -> M1\n")
    code, _, err = run(capsys, "validate", str(f))
    assert code == 1
    assert "A1 -> M1" in err


def test_validate_syntax_error(capsys, tmp_path):
    f = tmp_path / "g.graph"
    f.write_text("orientation: free\n[nodes]\nA untyped\n[edges]\nA => A\n")
    code, _, err = run(capsys, "validate", str(f))
    assert code == 1 and ":5:" in err


def test_validate_ok(capsys):
    code, out, _ = run(capsys, "validate", "--scenario", "transparency-bottomup")
    assert code == 0 and "14 nodes" in out


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "pagerank", str(tmp_path / "nope.graph"))
    assert code == 1 and "cannot read" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["trustrank", "--scenario", "robustness-topdown", "--seeds", "A3,ZZ"],
        ["trustrank", "--scenario", "robustness-topdown", "--seeds", ","],
        ["pagerank"],
        ["pagerank", "x.graph", "--scenario", "robustness-topdown"],
        ["pagerank", "--scenario", "nope"],
        ["pagerank", "--scenario", "robustness-topdown", "--alpha", "1.5"],
        ["pagerank", "--scenario", "robustness-topdown", "--bogus"],
        ["assess", "--scenario", "robustness-topdown", "--seeds", "A1", "--theta", "0"],
        ["catalog", "--requirement", "speed"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_strict_non_convergence(capsys):
    argv = ["pagerank", "--scenario", "robustness-topdown", "--max-iter", "2"]
    code, out, err = run(capsys, *argv)
    assert code == 0 and "did not converge" in err and out
    assert run(capsys, *argv, "--strict")[0] == 3


@pytest.mark.parametrize("fmt,marker", [("json", '"values"'), ("dot", "digraph"), ("svg", "<svg")])
def test_formats(capsys, fmt, marker):
    code, out, _ = run(capsys, "pagerank", "--scenario", "robustness-topdown", "--format", fmt)
    assert code == 0 and marker in out


def test_output_path(capsys, tmp_path):
    dest = tmp_path / "scores.csv"
    code, out, _ = run(capsys, "pagerank", "--scenario", "robustness-topdown", "-o", str(dest))
    assert code == 0 and out == ""
    assert dest.read_text().startswith("node,PageRank")


def test_sweep_tables(capsys):
    code, out, _ = run(capsys, "sweep", "--scenario", "transparency-bottomup", "--seeds", "A1,A2", "--workers", "2")
    assert code == 0
    seed_part, edge_part = out.split("\n\n")
    assert seed_part.splitlines()[1].startswith("baseline,A1 A2,")
    assert len(edge_part.splitlines()) == 1 + 19


def test_sweep_json(capsys):
    code, out, _ = run(capsys, "sweep", "--scenario", "robustness-topdown", "--seeds", "A3", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["warnings"]
    assert doc["seed_sweep"][0]["variant"] == "baseline"


def test_catalog(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == 0 and out.count("[") == 7
    code, out, _ = run(capsys, "catalog", "--requirement", "transparency", "--format", "json")
    assert json.loads(out)[0]["aspects"] == ["Traceability", "Explainability", "Communication"]


def test_stdin_input(capsys, monkeypatch):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO("orientation: free\n[nodes]\nA untyped\nB untyped\n[edges]\nA -> B\n"))
    code, out, _ = run(capsys, "pagerank", "-")
    assert code == 0 and out.splitlines()[1] == "A,0.2216"

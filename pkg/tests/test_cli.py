import json

import pytest
from click.testing import CliRunner

from bellcut.cli import main
from bellcut.families import catalog
from bellcut.io import emit_ineq, parse_ineq, parse_records


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args, input=None):
        return runner.invoke(main, list(args), input=input)
    return invoke


def test_catalog_and_check(run):
    res = run("catalog", "i3322")
    assert res.exit_code == 0
    assert parse_ineq(res.output) == catalog("i3322")
    res = run("--json", "check", input=res.output)
    assert res.exit_code == 0
    report = json.loads(res.output)["reports"][0]
    assert report["is_facet"] and report["valid"]
    assert set(report) == {"valid", "max_value", "root_count", "face_dim",
                           "polytope_dim", "is_facet", "witness"}


def test_check_negative_exit(run):
    text = "cg mA=1 mB=1\nrhs 0\nA1 1\n"
    res = run("--json", "check", input=text)
    assert res.exit_code == 1
    assert json.loads(res.output)["reports"][0]["valid"] is False


def test_parse_error_exit(run):
    res = run("check", input="cut tripartite nA=2 nB=1\nrhs 0\nA1A2 1\n")
    assert res.exit_code == 2
    assert "line 3" in res.output


def test_generate_and_te(run):
    res = run("--json", "generate", "cliqueweb", "3", "3", "0")
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert payload["family"] == "cliqueweb"
    parse_ineq(payload["inequality"])
    res = run("--format", "cg-matrix", "generate", "immm22", "3")
    assert res.output.startswith("cg-matrix mA=3 mB=3")
    res = run("generate", "cliqueweb", "4", "2", "0")
    assert res.exit_code == 2


def test_te_pentagonal(run):
    res = run("--json", "te", "--cg", input=emit_ineq(catalog("pentagonal")))
    assert res.exit_code == 0
    te = parse_ineq(json.loads(res.output)["results"][0])
    assert (te.mA, te.mB) == (3, 3)


def test_convert_round_trip(run):
    text = emit_ineq(catalog("chsh"))
    cut = run("convert", input=text).output
    back = run("convert", input=cut).output
    assert parse_ineq(back) == catalog("chsh")


def test_classify(run):
    text = "\n".join(emit_ineq(catalog(n)) for n in ("chsh", "i3322", "chsh"))
    res = run("--json", "classify", input=text)
    payload = json.loads(res.output)
    assert payload["count"] == 2
    assert sorted(c["count"] for c in payload["classes"]) == [1, 2]


def test_census_and_hull(run):
    res = run("--json", "census", "4")
    payload = json.loads(res.output)
    assert res.exit_code == 0 and payload["count"] == 2
    assert {"n", "count", "classes", "items", "dropped", "spot_checks"} <= set(payload)
    res = run("--json", "hull", "4")
    payload = json.loads(res.output)
    assert payload["facets"] == 16 and payload["certified"]
    assert run("hull", "7").exit_code == 2


def test_hull_points(run, tmp_path):
    path = tmp_path / "square.txt"
    path.write_text("0 0\n1 0\n0 1\n1 1\n")
    res = run("--json", "hull", "--points", str(path))
    facets = json.loads(res.output)["facets"]
    assert len(facets) == 4 and {"a", "rhs"} <= set(facets[0])


def test_fix_and_includes_chsh(run, tmp_path):
    path = tmp_path / "i3322.txt"
    path.write_text(emit_ineq(catalog("i3322")))
    res = run("fix", str(path), "A3=0", "B1=0")
    assert res.exit_code == 0
    assert parse_ineq(res.output).mA == 2
    assert run("fix", str(path), "A3=5").exit_code == 2
    res = run("--json", "includes-chsh", str(path))
    assert res.exit_code == 0
    assert json.loads(res.output)["status"] == "found"
    res = run("includes-chsh", input=emit_ineq(catalog("positive_probability")))
    assert res.exit_code == 1


def test_catalog_all(run):
    res = run("catalog")
    assert len(parse_records(res.output)) == 9
    assert run("--json", "catalog").exit_code == 0

import json

import pytest

from gkmquiver.cli import main
from gkmquiver.fixtures import get_fixture
from gkmquiver.quiver_core import instance_to_document, load_instance


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "name,code", [("fl_4", 0), ("a2_p1", 0), ("no_gkm_sink", 2), ("no_gkm_source", 2), ("branched_tree", 3), ("point", 0)]
)
def test_classify_exit_codes(capsys, name, code):
    got, out, _ = run(capsys, "classify", name)
    assert got == code
    assert out.startswith("verdict: ")


def test_classify_witness_line(capsys):
    _, out, _ = run(capsys, "classify", "no_gkm_sink")
    assert "witness: two-sink x1 -> y1 <- z1" in out


def test_poincare(capsys):
    code, out, _ = run(capsys, "poincare", "fl_4", "--at", "2")
    assert code == 0 and out.strip() == "315"
    code, out, _ = run(capsys, "poincare", "fl_4")
    assert code == 0 and "1 3 5 6 5 3 1" in out.replace(",", " ")


def test_moment_graph_outputs(capsys, tmp_path):
    dot, data = tmp_path / "g.dot", tmp_path / "g.json"
    code, out, _ = run(capsys, "moment-graph", "a2_p1", "--dot", str(dot), "--data", str(data))
    assert code == 0
    assert dot.read_text().startswith("digraph")
    doc = json.loads(data.read_text())
    assert len(doc["edges"]) == 1
    code, out, _ = run(capsys, "moment-graph", "a2_p1")
    assert "u0 -> u1\t+e2 -e1" in out


def test_kt_basis_store_and_verify(capsys, tmp_path):
    path = tmp_path / "kt.json"
    assert run(capsys, "kt-basis", "fl_3", "--out", str(path))[0] == 0
    assert run(capsys, "kt-basis", "fl_3", "--verify", str(path))[0] == 0
    doc = json.loads(path.read_text())
    # corrupt one stored component; verification must now fail
    cls = next(c for c in doc["classes"] if len(c["components"]) > 1)
    key = sorted(cls["components"])[0]
    terms = cls["components"][key]["terms"]
    terms[0][1] = str(int(terms[0][1]) + 7)
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "kt-basis", "fl_3", "--verify", str(path))
    assert code == 4 and "verified: 5/6" in out


def test_tree_mode_requires_flag(capsys):
    code, _, err = run(capsys, "fixed-points", "x3124")
    assert code == 4 and "--experimental" in err
    code, out, _ = run(capsys, "fixed-points", "x3124", "--experimental")
    assert code == 0 and "experimental: true" in out


def test_usage_and_input_errors(capsys, tmp_path):
    assert run(capsys, "poincare", "nosuch")[0] == 1
    assert run(capsys, "frobnicate")[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "poincare", str(bad))[0] == 1


def test_budget_exceeded(capsys):
    code, _, err = run(capsys, "oracle", "count-points", "fl_4", "--p", "3", "--budget", "5")
    assert code == 4 and "budget" in err


def test_oracles(capsys):
    code, out, _ = run(capsys, "oracle", "count-points", "fl_3", "--p", "3")
    assert code == 0 and out.splitlines()[1].split("\t")[:2] == ["3", "52"]
    code, out, _ = run(capsys, "oracle", "hom-dim", "a2_p1")
    assert code == 0 and len(out.splitlines()) == 3


def test_grading_check(capsys, tmp_path):
    good = tmp_path / "g.json"
    good.write_text(json.dumps({"gamma": [0, 5], "nu": [1]}))
    assert run(capsys, "grading", "a2_p1", "--check", str(good))[0] == 0
    good.write_text(json.dumps({"gamma": [0, 5], "nu": {"a": 1}}))
    assert run(capsys, "grading", "a2_p1", "--check", str(good))[0] == 0
    tie = tmp_path / "t.json"
    tie.write_text(json.dumps({"gamma": [0, 0], "nu": [1]}))
    assert run(capsys, "grading", "a2_p1", "--check", str(tie))[0] == 4


@pytest.mark.parametrize("cmd", ["fixed-points", "moment-graph", "kt-basis", "tangent", "hall-strata", "grading"])
def test_output_is_deterministic(capsys, cmd):
    first = run(capsys, cmd, "fl_3")
    second = run(capsys, cmd, "fl_3")
    assert first == second and first[0] == 0


def test_fixture_round_trip(capsys, tmp_path):
    path = tmp_path / "fl4.json"
    assert run(capsys, "fixture", "fl_4", "--out", str(path))[0] == 0
    assert instance_to_document(load_instance(path)) == instance_to_document(get_fixture("fl_4"))
    code, out, _ = run(capsys, "poincare", str(path), "--at", "3")
    assert code == 0 and out.strip() == "2080"

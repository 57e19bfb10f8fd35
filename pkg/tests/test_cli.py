import json
import subprocess
import sys

import jsonschema
import pytest

from colorgraphs.cli import main
from colorgraphs.io import load_schema, serialize_graph
from oracles import NO_FLIP_N8

SCHEMA = load_schema()


@pytest.fixture
def graph_file(tmp_path, tetrahedron):
    path = tmp_path / "tetra.txt"
    path.write_text(serialize_graph(tetrahedron, "explicit") + "\n")
    return path


@pytest.fixture
def fixture_file(tmp_path, violators16):
    path = tmp_path / "g1.txt"
    path.write_text(serialize_graph(violators16[0]) + "\n")
    return path


def run_json(capsys, *argv):
    code = main([*argv, "--json"])
    doc = json.loads(capsys.readouterr().out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["command"] == argv[0]
    return code, doc["result"]


def test_schema_is_valid():
    jsonschema.Draft202012Validator.check_schema(SCHEMA)


def test_max_faces(capsys, graph_file):
    assert main(["max-faces", "--graph", str(graph_file)]) == 0
    assert capsys.readouterr().out.strip() == "4"
    code, res = run_json(capsys, "max-faces", "--graph", str(graph_file), "--exact")
    assert code == 0 and res["max_f"] == 4 and res["maximizer_count"] == 3 and res["exact"]


def test_max_faces_budget(capsys, fixture_file):
    code, res = run_json(capsys, "max-faces", "--graph", str(fixture_file), "--budget", "20")
    assert code == 0 and not res["exact"]
    main(["max-faces", "--graph", str(fixture_file), "--budget", "20"])
    assert "lower bound" in capsys.readouterr().out


def test_bound(capsys, fixture_file, graph_file):
    code, res = run_json(capsys, "bound", "--graph", str(fixture_file))
    assert code == 0 and res["bound"] == 10 and not res["exceeds_threshold"]
    code, res = run_json(capsys, "bound", "--graph", str(graph_file))
    assert res["exceeds_threshold"]


def test_bound_without_certificate(capsys, tmp_path):
    path = tmp_path / "stuck.txt"
    path.write_text(serialize_graph(NO_FLIP_N8, "explicit"))
    code, res = run_json(capsys, "bound", "--graph", str(path))
    assert code == 1 and "error" in res


def test_moment(capsys, graph_file):
    code, res = run_json(capsys, "moment", "--graph", str(graph_file), "--nu", "2", "--eval", "3",
                         "--mc", "2000", "--N", "2", "--seed", "4", "--diagnostic")
    assert code == 0
    assert res["terms"] == {"0": 3}
    assert res["eval"]["value"] == "3"
    assert res["mc"]["seed"] == 4 and res["mc"]["rng"] == "numpy.PCG64"
    assert res["diagnostic"]["violates"] is False
    assert main(["moment", "--graph", str(graph_file)]) == 0
    assert capsys.readouterr().out.strip() == "3*N^0"


def test_canon(capsys, graph_file, tetrahedron):
    code, res = run_json(capsys, "canon", "--graph", str(graph_file))
    assert res["profile"] == [1, 1, 1] and res["record"] == serialize_graph(tetrahedron, "explicit")
    _, orbit = run_json(capsys, "canon", "--graph", str(graph_file), "--color-orbit")
    assert orbit["code"] <= res["code"]


def test_count_classes(capsys):
    code, res = run_json(capsys, "count-classes", "--n", "3")
    assert code == 0 and res["count"] == 11
    assert main(["count-classes", "--n", "7"]) == 2


def test_survey(capsys, tmp_path):
    out = tmp_path / "s4.json"
    code, res = run_json(capsys, "survey", "--n", "4", "--workers", "1", "--out", str(out), "--full")
    assert code == 0
    assert res["mst_count"] == 4 and res["mst_max_f_histogram"] == {"7": 4}
    assert len(res["classes"]) == 30
    assert json.loads(out.read_text())["results"]["class_count"] == 30
    assert main(["survey", "--n", "3", "--workers", "1"]) == 0
    assert "MST 2" in capsys.readouterr().out


def test_verify_fixtures(capsys):
    assert main(["verify-fixtures"]) == 0
    assert capsys.readouterr().out.strip() == "41/41 pass: MST, non-bipartite, maxF=12"


def test_verify_fixtures_failure(capsys, tmp_path, violators16, graph_file):
    path = tmp_path / "bad.txt"
    path.write_text(serialize_graph(violators16[0]) + "\n" + serialize_graph(violators16[0]) + "\n")
    code, res = run_json(capsys, "verify-fixtures", "--fixtures", str(path))
    assert code == 1 and res["failed"] == [2]
    assert main(["verify-fixtures", "--fixtures", str(tmp_path / "missing.txt")]) == 2


@pytest.mark.parametrize("argv", [
    [],
    ["max-faces"],
    ["max-faces", "--graph", "/nonexistent/graph.txt"],
    ["max-faces", "--graph", "GRAPH", "--exact", "--pruned"],
    ["survey", "--n", "12"],
    ["moment", "--graph", "GRAPH", "--mc", "10", "--N", "9"],
    ["frobnicate"],
])
def test_usage_errors(argv, graph_file, capsys):
    argv = [str(graph_file) if a == "GRAPH" else a for a in argv]
    assert main(argv) == 2


def test_malformed_graph_file(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("n=2; 3: {1,3},{3,4}\n")
    assert main(["canon", "--graph", str(path)]) == 2
    assert "column 15" in capsys.readouterr().err


def test_module_entry_point(graph_file):
    proc = subprocess.run([sys.executable, "-m", "colorgraphs", "max-faces", "--graph", str(graph_file)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "4"

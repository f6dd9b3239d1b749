import json
import subprocess
import sys

import pytest

from normtower import absgroup, cli
from normtower.graphs import path_graph
from normtower.normtrees import build_normal


def run(*argv):
    code, report, _ = cli.run(list(argv))
    return code, report


@pytest.mark.parametrize(
    "argv,code",
    [
        (["stage", "--n", "2"], 0),
        (["stage", "--n", "0"], 0),
        (["stage", "--n", "2", "--tamper"], 1),
        (["stage", "--n", "5"], 3),
        (["--budget", "5", "stage", "--n", "3"], 2),
        (["dcons", "--n", "2", "--m", "1"], 0),
        (["dcons", "--n", "2", "--m", "2"], 3),
        (["assemble", "--L", "3", "--alpha", "2"], 0),
        (["relabel", "--L", "3", "--alpha", "2", "--beta", "1"], 0),
        (["relabel", "--L", "3", "--alpha", "0", "--beta", "2", "--representative", "max"], 0),
        (["relabel", "--L", "3", "--alpha", "1", "--identity"], 0),
        (["relabel", "--L", "3", "--alpha", "1"], 3),
        (["relabel", "--L", "3", "--alpha", "1", "--partition", "[[0, 1]]"], 3),
        (["tower", "--group", "dihedral10"], 0),
        (["tower", "--group", "klein4"], 1),
        (["tower", "--group", "sym4", "--bound", "10"], 2),
        (["graph", "--family", "3"], 0),
        (["graph", "--tree-height", "3"], 0),
        (["pgl", "--q", "8", "--H", "full"], 0),
        (["pgl", "--q", "9", "--H", "trivial"], 0),
        (["pgl", "--q", "6"], 3),
        (["pgl", "--q", "16", "--H", "x"], 3),
        (["tree", "--height", "4", "--extend-iso"], 0),
        (["tree", "--height", "2", "--extend-to", "1"], 3),
    ],
)
def test_exit_codes(argv, code):
    got, report = run(*argv)
    assert got == code, report
    assert report["schema_version"] == cli.SCHEMA_VERSION
    assert report["command"] in argv
    assert report["status"] == {0: "ok", 1: "failed", 2: "budget", 3: "invalid"}[code]


def test_report_contents():
    _, r = run("stage", "--n", "2")
    assert r["result"]["height"] == 2 and r["result"]["stage"]["F_order"] == 8
    assert r["config"]["n"] == 2 and r["config"]["method"] == "auto"
    _, r = run("tower", "--group", "dihedral10")
    assert r["result"]["tau"] == 1
    _, r = run("tree", "--height", "4", "--extend-iso")
    assert r["result"]["witness_count"] == 128


def test_file_inputs(tmp_path):
    g = tmp_path / "g.json"
    g.write_text(json.dumps(path_graph(4).to_json()))
    code, r = run("graph", "--file", str(g))
    assert code == 0 and r["result"]["aut_order"] == 2

    t = tmp_path / "t.json"
    t.write_text(json.dumps(build_normal(3).to_json()))
    code, r = run("tree", "--file", str(t), "--extend-to", "4")
    assert code == 0 and r["result"]["levels"] == [1, 2, 4, 8]

    G = tmp_path / "G.json"
    G.write_text(json.dumps(absgroup.catalog("sym3").to_json()))
    code, r = run("tower", "--file", str(G))
    assert code == 0 and r["result"]["tau"] == 0

    code, _ = run("graph", "--file", str(tmp_path / "missing.json"))
    assert code == 3


def test_main_writes_out_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert cli.main(["--out", str(out), "stage", "--n", "1"]) == 0
    assert json.loads(out.read_text())["status"] == "ok"
    assert capsys.readouterr().out == ""


def test_usage_errors_exit_invalid(capsys):
    assert cli.main(["stage"]) == 3
    assert cli.main(["nonsense"]) == 3
    assert cli.main(["stage", "--n", "1", "--m", "1"]) == 3


def test_reruns_are_byte_identical():
    argv = [sys.executable, "-m", "normtower.cli", "dcons", "--n", "2", "--m", "1"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["status"] == "ok"

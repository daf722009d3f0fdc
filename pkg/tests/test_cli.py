"""Command line behaviour and golden outputs.

Set TWINCSP_UPDATE_GOLDEN=1 to rewrite the files under tests/golden.
"""

import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from twincsp.cli import main

HERE = Path(__file__).parent
DATA = HERE / "data"
GOLDEN = HERE / "golden"
UPDATE = os.environ.get("TWINCSP_UPDATE_GOLDEN") == "1"


def d(name):
    return str(DATA / name)


# name, argv, expected exit code
DOCUMENTED = [
    ("enumerate_z6", ["enumerate", "--order", "6", "--what", "z"], 0),
    ("enumerate_z8", ["enumerate", "--order", "8", "--what", "z"], 0),
    ("enumerate_t5_witnesses", ["enumerate", "--order", "5", "--what", "t", "--witnesses"], 0),
    ("enumerate_s5_text", ["enumerate", "--order", "5", "--what", "s", "--emit", "text"], 0),
    ("enumerate_csp4_witnesses", ["enumerate", "--order", "4", "--what", "csp", "--witnesses"], 0),
    ("twins_c6_k2", ["twins", d("c6.tsv"), "--kind", "F", "--pattern", "K2"], 0),
    ("twins_c6_order2_t", ["twins", d("c6.tsv"), "--kind", "t", "--pattern-order", "2"], 0),
    ("twins_fig5_vertices", ["twins", d("fig5_quotient.tsv"), "--kind", "f", "--pattern-order", "1"], 0),
    ("csp_validate_ok", ["csp", "validate", d("fig5_structure.tsv"), d("fig5_structure_classes.tsv")], 0),
    ("csp_validate_network", ["csp", "validate", d("fig5_quotient.tsv"), "fig5.tsv"], 1),
    ("csp_reduce_fig5", ["csp", "reduce", d("fig5_quotient.tsv"), "fig5.tsv", "--prefer", "Israel,Pakistan,South Africa"], 0),
    ("csp_reduce_dot", ["csp", "reduce", d("fig5_quotient.tsv"), "fig5.tsv", "--prefer", "Israel,Pakistan", "--emit", "dot"], 0),
    ("csp_reduce_bad", ["csp", "reduce", d("fig5_quotient.tsv"), d("fig5_bad.tsv")], 1),
    ("csp_decompose", ["csp", "decompose", d("fig5_structure.tsv"), d("fig5_structure_classes.tsv")], 0),
    ("trade_fig5_dot", ["trade", "--cluster-threshold", "75M", "--labels", "scenarios/fig5.tsv", "--emit", "dot"], 0),
    ("trade_fig6_json", ["trade", "--cluster-threshold", "125M"], 0),
    ("trade_fig7_text", ["trade", "--scenario", "fig7", "--emit", "text"], 0),
    ("trade_fig8_json", ["trade", "--cluster-threshold", "500M", "--dissimilarity", "1.0", "--drop-edge", "Australasia,India"], 0),
    ("trade_unlabelled", ["trade", "--cluster-threshold", "90M"], 0),
    ("trade_bad_labels", ["trade", "--cluster-threshold", "75M", "--labels", d("fig5_bad.tsv")], 1),
    ("graph_info", ["graph", "info", d("fig5_structure.tsv"), "--partition", d("fig5_structure_classes.tsv")], 0),
    ("graph_info_dot", ["graph", "info", d("c6.tsv"), "--emit", "dot"], 0),
]


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


@pytest.fixture(autouse=True)
def _cwd(monkeypatch):
    # relative names such as scenarios/fig5.tsv must resolve to the packaged files
    monkeypatch.chdir(HERE)


@pytest.mark.parametrize("name,argv,code", DOCUMENTED, ids=[c[0] for c in DOCUMENTED])
def test_golden(name, argv, code):
    got_code, first = run(argv)
    assert got_code == code
    _, second = run(argv)
    assert first == second
    path = GOLDEN / f"{name}.out"
    if UPDATE or not path.exists():
        path.write_text(first, encoding="utf-8")
    assert first == path.read_text(encoding="utf-8")


class TestContent:
    def test_z6_is_nine(self):
        code, text = run(["enumerate", "--order", "6", "--what", "z"])
        doc = json.loads(text)
        assert code == 0 and doc["counts"]["z"] == 9
        assert doc["counts"]["x"] + doc["counts"]["y"] == 9

    def test_small_z_orders_are_zero(self):
        _, text = run(["enumerate", "--order", "2", "--what", "z"])
        assert json.loads(text)["counts"]["z"] == 0

    def test_csp_brute_force_route(self):
        _, a = run(["enumerate", "--order", "5", "--what", "csp"])
        _, b = run(["enumerate", "--order", "5", "--what", "csp", "--brute-force"])
        assert json.loads(a)["counts"] == json.loads(b)["counts"] == {"csp": 4}

    def test_fig5_dot_has_four_coloured_nodes(self):
        _, dot = run(["trade", "--cluster-threshold", "75M", "--labels", "scenarios/fig5.tsv", "--emit", "dot"])
        nodes = [line for line in dot.splitlines() if "fillcolor=" in line and " -- " not in line]
        assert len(nodes) == 4
        colours = {line.split("fillcolor=")[1].split(",")[0] for line in nodes}
        assert colours == {"black", "grey", "white"}

    def test_scenario_labels_found_without_flag(self):
        _, text = run(["trade", "--cluster-threshold", "125M"])
        doc = json.loads(text)
        assert len(doc["structure"]["vertices"]) == 8
        assert doc["config"]["cluster_threshold"] == 125_000

    def test_drop_edge_route(self):
        _, text = run(["trade", "--cluster-threshold", "500M", "--dissimilarity", "1.0", "--drop-edge", "Australasia,India"])
        doc = json.loads(text)
        assert len(doc["structure"]["vertices"]) == 8
        assert doc["dropped_edges"] == [["Australasia", "India", 20366]]

    def test_unlabelled_run_has_stages_only(self):
        _, text = run(["trade", "--cluster-threshold", "90M"])
        doc = json.loads(text)
        assert doc["structure"] is None
        for stage in doc["stages"]:
            assert set(stage) == {"name", "vertices", "edges", "classes"}

    def test_reduce_output(self):
        _, text = run(["csp", "reduce", d("fig5_quotient.tsv"), "fig5.tsv", "--prefer", "Israel,Pakistan,South Africa"])
        doc = json.loads(text)
        names = {v["name"] for v in doc["structure"]["vertices"]}
        assert names == {"Core", "Israel", "Pakistan", "South Africa"}

    def test_twins_c6_edges(self):
        _, text = run(["twins", d("c6.tsv"), "--kind", "F", "--pattern", "K2"])
        doc = json.loads(text)
        assert doc["kind"] == "F"
        assert [["0", "1"], ["3", "4"]] in doc["classes"]


class TestErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            ["twins", "--kind", "f", "--pattern-order", "1", "nonexistent.tsv"],
            ["enumerate", "--order", "9", "--what", "z"],
            ["enumerate", "--order", "8", "--what", "t"],
            ["enumerate", "--order", "4", "--emit", "dot"],
            ["trade", "--scenario", "fig5", "--cluster-threshold", "75M"],
            ["trade", "--drop-edge", "India"],
            ["trade", "--labels", "nowhere.tsv"],
            ["trade", "--cluster-threshold", "lots"],
            ["trade", "--bogus"],
            ["csp", "validate", d("c6.tsv"), d("fig5_structure_classes.tsv")],
            ["twins", d("c6.tsv"), "--kind", "F", "--pattern-order", "9"],
            ["twins", d("c6.tsv"), "--kind", "F", "--pattern", "Q3"],
        ],
    )
    def test_exit_two(self, argv, capsys):
        code, _ = run(argv)
        assert code == 2
        assert capsys.readouterr().err

    def test_error_message_prefix(self, capsys):
        run(["graph", "info", "missing.tsv"])
        assert capsys.readouterr().err.startswith("twincsp: error: cannot read missing.tsv")

    def test_malformed_edge_list(self, tmp_path, capsys):
        p = tmp_path / "bad.tsv"
        p.write_text("a\n")
        assert run(["graph", "info", str(p)])[0] == 2
        assert "bad.tsv:1" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "twincsp", "enumerate", "--order", "4", "--what", "z"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["counts"]["z"] == 2

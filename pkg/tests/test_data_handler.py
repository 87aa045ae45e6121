import json

import pytest

from models.errors import DecompositionInvalid, InvalidGraph, LoopCreated, SortError
from models.schemas import DecompositionKind, Language, RunReport, Verdict
from services import corpus, decomposer
from services.algebra import parse_expression, to_sexpr
from services.data_handler import data_handler

GRAPH = {
    "mode": "loopfree",
    "directed": True,
    "vertices": ["a", "b", "c"],
    "edges": [{"id": "x", "endpoints": ["a", "b"], "start": 1}, {"id": "y", "endpoints": ["c", "b", "a"], "start": 2}],
    "terminals": ["c", "a"],
}


class TestGraphs:

    def test_parse(self):
        G = data_handler.parse_graph(json.dumps(GRAPH))
        assert G.vertices == ("a", "b", "c")
        assert G.word("y") == ("c", "b", "a")
        assert G.start("y") == 2
        assert G.terminals == ("c", "a")
        assert not G.loops

    def test_round_trip(self, tmp_path):
        G = data_handler.parse_graph(json.dumps(GRAPH))
        data_handler.save_graph(G, tmp_path / "g.json")
        assert data_handler.load_graph(tmp_path / "g.json") == G

    def test_undirected_files_omit_start(self, named_graphs):
        text = data_handler.dump_graph(named_graphs["P3"])
        assert "start" not in text
        assert data_handler.parse_graph(text) == named_graphs["P3"]

    def test_loop_mode(self):
        G = corpus.loop_graphs()[0]
        text = data_handler.dump_graph(G)
        assert json.loads(text)["mode"] == "loops"
        assert data_handler.parse_graph(text) == G

    @pytest.mark.parametrize("change", [
        {"vertices": []},
        {"directed": False},
        {"extra": 1},
        {"edges": [{"id": "x", "endpoints": [], "start": 1}]},
        {"terminals": ["z"]},
        {"edges": [{"id": "x", "endpoints": ["a", "q"], "start": 1}]},
        {"edges": [{"id": "x", "endpoints": ["a", "b"], "start": 2}]},
    ])
    def test_invalid_graphs(self, change):
        with pytest.raises(InvalidGraph):
            data_handler.parse_graph(json.dumps({**GRAPH, **change}))

    def test_loops_need_loop_mode(self):
        spec = {**GRAPH, "edges": [{"id": "x", "endpoints": ["a", "a"], "start": 1}]}
        with pytest.raises(LoopCreated):
            data_handler.parse_graph(json.dumps(spec))
        assert data_handler.parse_graph(json.dumps({**spec, "mode": "loops"})).loops

    def test_missing_file(self, tmp_path):
        with pytest.raises(ValueError, match="Error loading file"):
            data_handler.load_graph(tmp_path / "nothing.json")


class TestDecompositions:

    def test_round_trip(self, tmp_path, named_graphs):
        G = named_graphs["C5"]
        D = decomposer.make_nice(decomposer.verdant_root(decomposer.decompose(G, 2), G))
        data_handler.save_decomposition(D, tmp_path / "d.json")
        loaded = data_handler.load_decomposition(tmp_path / "d.json")
        assert loaded.root == D.root
        assert loaded.bags == D.bags
        assert decomposer.validate(loaded, G) == []
        assert loaded.is_nice()

    def test_unrooted_round_trip(self, named_graphs):
        G = named_graphs["P4"]
        D = decomposer.decompose(G, 1, DecompositionKind.PATH)
        loaded = data_handler.parse_decomposition(data_handler.dump_decomposition(D))
        assert loaded.kind == DecompositionKind.PATH
        assert loaded.root is None
        assert decomposer.validate(loaded, G) == []

    def test_unknown_parent(self):
        text = json.dumps({"nodes": [{"id": "a", "bag": ["v0"]}, {"id": "b", "parent": "zz", "bag": ["v0"]}]})
        with pytest.raises(DecompositionInvalid, match="unknown parent"):
            data_handler.parse_decomposition(text)

    def test_duplicate_ids(self):
        text = json.dumps({"nodes": [{"id": "a", "bag": []}, {"id": "a", "bag": []}]})
        with pytest.raises(DecompositionInvalid):
            data_handler.parse_decomposition(text)


class TestFormulasAndExpressions:

    def test_formula_files(self, tmp_path):
        f = corpus.sentence("two_colourable")
        data_handler.save_formula(f, tmp_path / "f.mso")
        assert data_handler.load_formula(tmp_path / "f.mso") == f

    def test_circuit_language(self, tmp_path):
        path = tmp_path / "f.mso"
        path.write_text("# comment\nforall X:V. sgl(X)\n")
        data_handler.load_formula(path, Language.CIRCUIT)
        path.write_text("forall x:v. sgl(x)")
        with pytest.raises(SortError):
            data_handler.load_formula(path, Language.CIRCUIT)

    def test_expression_files(self, tmp_path):
        e = parse_expression("(twine 2 {1} (e 2) (sprout (v)))")
        data_handler.save_expression(e, tmp_path / "e.expr")
        assert to_sexpr(data_handler.load_expression(tmp_path / "e.expr")) == to_sexpr(e)


class TestReports:

    def _report(self):
        return RunReport(tool="t", version="1", command="check", verdict=Verdict.TRUE,
                         timings={"b": 0.1, "a": 0.2}, details={"z": 1, "y": [2]})

    def test_report_is_deterministic(self):
        text = data_handler.dump_report(self._report())
        assert text == data_handler.dump_report(self._report())
        data = json.loads(text)
        assert data["verdict"] == "true"
        assert "engine" not in data
        assert list(data) == sorted(data)

    def test_digest(self, tmp_path):
        path = tmp_path / "x.txt"
        path.write_text("abc")
        assert data_handler.digest(path) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"

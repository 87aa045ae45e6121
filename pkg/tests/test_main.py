import json

import pytest

from main import EXIT_BOUND, EXIT_USAGE, build_parser, main
from models.errors import MissingTransition
from models.schemas import EngineKind, Family
from services import corpus, fuzzer
from services.algebra import to_sexpr
from services.data_handler import data_handler
from services.engine import build_expression
from services.formula_parser import to_text


@pytest.fixture
def files(tmp_path, named_graphs):
    """Graph and formula files in a temporary directory"""
    paths = {}
    for name in ("C4", "C5", "K4", "P4"):
        paths[name] = tmp_path / f"{name}.graph.json"
        data_handler.save_graph(named_graphs[name], paths[name])
    paths["even"] = tmp_path / "even.mso"
    paths["even"].write_text(corpus.DIRECT_SENTENCES["even_vertices"])
    paths["bad"] = tmp_path / "bad.mso"
    paths["bad"].write_text("exists X:V. sgl(X")
    return {name: str(path) for name, path in paths.items()}


def _report(capsys):
    return json.loads(capsys.readouterr().out)


def test_check_true(files, capsys):
    assert main(["check", files["C4"], files["even"], "-k", "2"]) == 0
    report = _report(capsys)
    assert report["verdict"] == "true"
    assert set(report["input_digests"]) == {"graph", "formula"}


def test_check_false(files, capsys):
    assert main(["check", files["C5"], files["even"], "-k", "2", "--engine", "automaton"]) == 1
    assert _report(capsys)["verdict"] == "false"


def test_check_named_sentence(files, capsys):
    assert main(["check", files["P4"], "--sentence", "has_edge", "-k", "1", "--family", "path"]) == 0
    assert _report(capsys)["family"] == "path"


def test_malformed_formula(files, capsys):
    assert main(["check", files["C4"], files["bad"], "-k", "2"]) == EXIT_USAGE
    assert capsys.readouterr().out == ""


def test_missing_formula(files):
    assert main(["check", files["C4"], "-k", "2"]) == EXIT_USAGE


def test_width_too_small(files, capsys):
    assert main(["check", files["K4"], files["even"], "-k", "2"]) == EXIT_BOUND
    assert main(["decompose", files["K4"], "-k", "2"]) == EXIT_BOUND


def test_bound_override(files):
    assert main(["--max-width", "0", "check", files["C4"], files["even"], "-k", "2"]) == EXIT_BOUND


def test_supplied_decomposition(files, tmp_path, capsys):
    out = tmp_path / "d.json"
    assert main(["decompose", files["C5"], "-k", "2", "--nice", "-o", str(out)]) == 0
    assert data_handler.load_decomposition(out).is_nice()
    assert main(["check", files["C5"], files["even"], "-k", "2", "-d", str(out)]) == 1
    assert "decomposition" in _report(capsys)["input_digests"]


def test_emptiness(tmp_path, capsys):
    assert main(["emptiness", "--sentence", "contradiction", "-k", "1", "--language", "circuit"]) == 1
    assert _report(capsys)["verdict"] == "empty"
    prefix = tmp_path / "witness"
    assert main(["emptiness", "--sentence", "has_edge", "-k", "1", "-w", str(prefix)]) == 0
    report = _report(capsys)
    assert report["verdict"] == "witness"
    assert report["details"]["verified"] is True
    G = data_handler.load_graph(tmp_path / "witness.graph.json")
    assert G.edges
    assert (tmp_path / "witness.expr").read_text().strip() == report["details"]["witness"]


def test_build_and_eval_expression(files, tmp_path, named_graphs):
    expr = tmp_path / "c4.expr"
    assert main(["build-expr", files["C4"], "-k", "2", "-o", str(expr)]) == 0
    e, _ = build_expression(named_graphs["C4"], 2, Family.TREE)
    assert expr.read_text().strip() == to_sexpr(e)
    graph = tmp_path / "c4.graph.json"
    assert main(["eval-expr", str(expr), "-o", str(graph)]) == 0
    assert len(data_handler.load_graph(graph).edges) == 4


def test_translate(tmp_path, capsys):
    path = tmp_path / "f.mso"
    path.write_text("forall x:v. in(x, term{1}(empty)) | !(x = x)")
    assert main(["translate", str(path)]) == 0
    assert ":v" not in capsys.readouterr().out


def test_translate_keeps_a_circuitous_formula(tmp_path, capsys):
    path = tmp_path / "f.mso"
    path.write_text(corpus.CIRCUIT_SENTENCES["has_edge"])
    assert main(["translate", str(path)]) == 0
    assert capsys.readouterr().out == to_text(corpus.sentence("has_edge")) + "\n"


def test_fuzz(tmp_path, capsys):
    assert main(["fuzz", "--graphs", "4", "--sentences", "2", "--max-vertices", "3", "--out", str(tmp_path)]) == 0
    assert _report(capsys)["details"]["disagreements"] == 0


def test_fuzz_fails_when_an_engine_errors(tmp_path, monkeypatch, capsys):
    real = fuzzer.check

    def check(G, f, k, family, engine):
        if engine == EngineKind.AUTOMATON:
            raise MissingTransition("no transition")
        return real(G, f, k, family, engine=engine)

    monkeypatch.setattr(fuzzer, "check", check)
    assert main(["fuzz", "--graphs", "2", "--sentences", "1", "--max-vertices", "2", "--out", str(tmp_path)]) == 1
    details = _report(capsys)["details"]
    assert details["disagreements"] == details["automaton_errors"] > 0
    assert list(tmp_path.glob("case*.graph.json"))


def test_usage_errors():
    with pytest.raises(SystemExit) as info:
        main(["check"])
    assert info.value.code == 2
    with pytest.raises(SystemExit):
        build_parser().parse_args(["check", "g.json", "--engine", "quantum", "-k", "1"])

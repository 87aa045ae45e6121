import networkx as nx
import numpy as np
import pytest

from models.errors import ClosureBudgetExceeded, InvalidExpression
from models.schemas import EngineKind, Family
from services import corpus, fuzzer
from services.data_handler import data_handler
from services.formula_parser import to_text
from services.semantics import eval_circuit, metrics
from services.translation import is_circuitous


def test_random_sentences_are_reproducible():
    a = [to_text(fuzzer.random_sentence(np.random.default_rng(5))) for _ in range(3)]
    b = [to_text(fuzzer.random_sentence(np.random.default_rng(5))) for _ in range(3)]
    assert a == b


def test_random_sentences_are_small_circuitous_sentences(rng):
    for _ in range(50):
        f = fuzzer.random_sentence(rng, width=2, atoms=3)
        assert is_circuitous(f)
        assert not f.free_vars
        m = metrics(f)
        assert m.width <= 2
        assert m.max_var_index <= 3


def test_smallest_width(named_graphs):
    assert fuzzer.smallest_width(named_graphs["P4"], Family.TREE) == 1
    assert fuzzer.smallest_width(named_graphs["C5"], Family.TREE) == 2
    assert fuzzer.smallest_width(named_graphs["K4"], Family.TREE) == 3
    assert fuzzer.smallest_width(named_graphs["K4"], Family.GENERIC) == 0


def test_small_fuzz_run():
    report = fuzzer.fuzz(graphs=12, sentences=4, seed=1, max_vertices=3)
    assert report.ok
    summary = report.summary()
    assert summary["disagreements"] == 0
    assert summary["cases"] == len(report.table)
    assert report.table["agree"].all()
    assert summary["tree_agreements"] == summary["tree_cases"]
    assert summary["inductive_errors"] == summary["automaton_gave_up"] == 0
    assert {"oracle", "inductive", "automaton"} <= set(report.table.columns)


def test_fuzz_is_reproducible():
    a = fuzzer.fuzz(graphs=6, sentences=3, seed=9, max_vertices=3)
    b = fuzzer.fuzz(graphs=6, sentences=3, seed=9, max_vertices=3)
    assert a.table.equals(b.table)


@pytest.mark.slow
def test_default_fuzz_run():
    assert fuzzer.fuzz(seed=0).ok


def test_shrink_keeps_the_failure():
    G = corpus.complete_graph(4)
    f = corpus.sentence("has_edge")
    small = fuzzer.shrink(G, lambda H: eval_circuit(f, H))
    assert len(small.edges) == 1
    assert len(small.vertices) == 2


def test_shrink_keeps_terminals():
    G = corpus.from_networkx(nx.path_graph(4), [3])
    small = fuzzer.shrink(G, lambda H: True)
    assert small.vertices == ("v3",)
    assert not small.edges


def test_verdicts_report_every_engine(named_graphs):
    values = fuzzer.verdicts(named_graphs["C4"], corpus.sentence("even_vertices"), 2, Family.TREE)
    assert values == {"oracle": True, "inductive": True, "automaton": True}


def _failing(error, broken):
    real = fuzzer.check

    def check(G, f, k, family, engine):
        if engine == broken:
            raise error("engine failure")
        return real(G, f, k, family, engine=engine)
    return check


def test_engine_errors_count_as_disagreements(monkeypatch, named_graphs):
    monkeypatch.setattr(fuzzer, "check", _failing(InvalidExpression, EngineKind.INDUCTIVE))
    values = fuzzer.verdicts(named_graphs["C4"], corpus.sentence("even_vertices"), 2, Family.TREE)
    assert values == {"oracle": True, "inductive": "InvalidExpression", "automaton": True}
    report = fuzzer.fuzz(graphs=4, sentences=2, seed=1, max_vertices=3)
    assert not report.ok
    summary = report.summary()
    assert summary["cases"] > 0
    assert summary["disagreements"] == summary["cases"] == summary["inductive_errors"]


def test_budget_give_ups_are_counted(monkeypatch):
    monkeypatch.setattr(fuzzer, "check", _failing(ClosureBudgetExceeded, EngineKind.AUTOMATON))
    report = fuzzer.fuzz(graphs=4, sentences=2, seed=1, max_vertices=3)
    assert report.ok
    summary = report.summary()
    assert summary["automaton_gave_up"] == summary["cases"]
    assert summary["inductive_gave_up"] == 0


def test_write_reproduction(tmp_path, named_graphs):
    f = corpus.sentence("two_vertices")
    fuzzer.write_reproduction(tmp_path / "repro", 1, named_graphs["P3"], f)
    assert data_handler.load_graph(tmp_path / "repro" / "case1.graph.json") == named_graphs["P3"]
    text = (tmp_path / "repro" / "case1.formula").read_text()
    assert text.strip() == to_text(f)


def test_scaling_fit_of_a_line():
    fit = fuzzer.scaling_fit([1, 2, 3, 4], [5, 8, 11, 14])
    assert fit.slope == pytest.approx(3.0)
    assert fit.intercept == pytest.approx(2.0)
    assert fit.residual_ratio == pytest.approx(1.0)


def test_scaling_fit_flags_curvature():
    sizes = [1, 2, 3, 4, 5, 6]
    assert fuzzer.scaling_fit(sizes, [s * s + 20 for s in sizes]).residual_ratio > 1.1


@pytest.mark.parametrize("family,k", [(Family.TREE, 1), (Family.PATH, 1)])
def test_expression_size_grows_linearly(family, k):
    table = fuzzer.size_table(corpus.path_graph, [4, 8, 12, 16], family, k)
    assert list(table.columns) == ["length", "size", "nodes"]
    fit = fuzzer.scaling_fit(table["size"], table["nodes"])
    assert fit.slope > 0
    assert fit.residual_ratio < 1.5


@pytest.mark.slow
def test_expression_size_of_cycles_and_caterpillars():
    for make, family, k in ((corpus.cycle_graph, Family.TREE, 2), (corpus.caterpillar, Family.PATH, 2)):
        table = fuzzer.size_table(make, [8, 16, 32, 64], family, k)
        assert fuzzer.scaling_fit(table["size"], table["nodes"]).residual_ratio < 1.5

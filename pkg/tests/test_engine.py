import pytest

from config import settings
from models.decompositions import Decomposition
from models.errors import BoundExceeded, DecompositionInvalid, FormulaError, NoneWithinBound
from models.formulas import TOP
from models.schemas import DecompositionKind, EngineKind, Family, Verdict
from services import corpus, decomposer
from services.algebra import parse_expression
from services.engine import MemoTable, as_sentence, build_expression, check, evaluate_on_expression
from services.formula_parser import parse_circuit
from services.fuzzer import smallest_width
from services.semantics import eval_circuit

ENGINES = [EngineKind.INDUCTIVE, EngineKind.AUTOMATON, EngineKind.ORACLE]
FAMILIES = [Family.TREE, Family.PATH, Family.GENERIC]

FAST = ["has_edge", "edgeless", "two_vertices", "even_vertices", "vertices_mod3", "even_edges",
        "has_binary_edge", "at_most_one_edge", "odd_independent_set"]


@pytest.mark.parametrize("engine", ENGINES)
@pytest.mark.parametrize("family", [Family.TREE, Family.PATH])
@pytest.mark.parametrize("name,graph,expected", [
    ("has_edge", "P3", True),
    ("even_vertices", "C4", True),
    ("even_vertices", "C5", False),
    ("even_edges", "star3", False),
    ("at_most_one_edge", "P3", False),
])
def test_named_verdicts(named_graphs, engine, family, name, graph, expected):
    value, report = check(named_graphs[graph], corpus.sentence(name), 2, family, engine=engine)
    assert value == expected
    assert report.verdict == (Verdict.TRUE if expected else Verdict.FALSE)


@pytest.mark.slow
@pytest.mark.parametrize("engine", [EngineKind.INDUCTIVE, EngineKind.AUTOMATON])
@pytest.mark.parametrize("name,graph,k,expected", [
    ("two_colourable", "C4", 2, True),
    ("two_colourable", "C5", 2, False),
    ("two_colourable", "P5", 1, True),
    ("triangle", "C3", 2, True),
    ("triangle", "C4", 2, False),
    ("three_colourable", "C5", 2, True),
    ("three_colourable", "K4", 3, False),
])
def test_direct_sentences(named_graphs, engine, name, graph, k, expected):
    value, _ = check(named_graphs[graph], corpus.sentence(name), k, Family.TREE, engine=engine)
    assert value == expected


def test_generic_family(named_graphs):
    for name in ("has_edge", "even_vertices", "odd_independent_set"):
        G = named_graphs["C4"]
        value, report = check(G, corpus.sentence(name), 0, Family.GENERIC)
        assert value == eval_circuit(corpus.sentence(name), G)
        assert report.decomposition_width is None


def test_report_fields(named_graphs):
    _, report = check(named_graphs["C5"], corpus.sentence("has_edge"), 2)
    assert report.command == "check"
    assert report.engine == EngineKind.INDUCTIVE
    assert report.family == Family.TREE
    assert report.width_bound == 2
    assert report.decomposition_width <= 2
    assert report.expression_nodes > 0
    assert report.memo_entries > 0
    assert report.memo_lookups > 0
    assert report.distinct_formulas > 0
    assert set(report.timings) == {"translate", "build", "evaluate"}
    assert report.metrics.width == 1


def test_memo_counts_lookups():
    memo = MemoTable()
    e = parse_expression("(v)")
    memo.store(e, TOP, True)
    assert memo.lookups == 0
    assert memo.lookup(e, TOP)
    assert memo.lookup(e, TOP)
    assert memo.lookups == 2
    assert memo.entries == 1


def test_automaton_report(named_graphs):
    _, report = check(named_graphs["P4"], corpus.sentence("even_vertices"), 1, engine=EngineKind.AUTOMATON)
    assert report.closure_formulas > 0
    assert report.automaton_states > 0
    assert report.memo_entries is None


def test_oracle_report(named_graphs):
    _, report = check(named_graphs["P4"], corpus.sentence("has_edge"), 1, engine=EngineKind.ORACLE)
    assert report.expression_nodes is None
    assert "build" not in report.timings


def test_bounds_are_enforced(named_graphs):
    settings.apply_overrides(max_width=1)
    with pytest.raises(BoundExceeded):
        check(named_graphs["P3"], corpus.sentence("two_vertices"), 1)
    check(named_graphs["P3"], corpus.sentence("has_edge"), 1)


def test_variable_index_bound(named_graphs):
    settings.apply_overrides(max_vars=1)
    with pytest.raises(BoundExceeded, match="variable index 2"):
        check(named_graphs["P3"], corpus.sentence("two_vertices"), 2)


def test_width_below_treewidth(named_graphs):
    with pytest.raises(NoneWithinBound):
        check(named_graphs["K4"], corpus.sentence("has_edge"), 2)


def test_sentences_only(named_graphs):
    with pytest.raises(FormulaError):
        check(named_graphs["P3"], parse_circuit("sgl(X)", {"X": "V"}), 1)
    with pytest.raises(FormulaError):
        as_sentence(parse_circuit("sgl(X)", {"X": "V"}))


def test_supplied_decomposition(named_graphs):
    G = named_graphs["C5"]
    D = decomposer.decompose(G, 2)
    value, report = check(G, corpus.sentence("odd_vertices"), 2, decomposition=D)
    assert value
    assert report.decomposition_width == D.width


def test_invalid_supplied_decomposition(named_graphs):
    G = named_graphs["P3"]
    bags = {"a": frozenset({"v0", "v1"})}
    D = Decomposition(DecompositionKind.TREE, ("a",), bags)
    with pytest.raises(DecompositionInvalid):
        check(G, corpus.sentence("has_edge"), 1, decomposition=D)


def test_memo_is_deterministic(named_graphs):
    f = as_sentence(corpus.sentence("odd_independent_set"))
    e, _ = build_expression(named_graphs["C6"], 2, Family.TREE)
    first, second = MemoTable(), MemoTable()
    assert evaluate_on_expression(f, e, first) == evaluate_on_expression(f, e, second)
    assert first.entries == second.entries
    assert first.distinct_formulas == second.distinct_formulas


def test_memo_entries_are_written_once(named_graphs):
    f = corpus.sentence("has_edge")
    e, _ = build_expression(named_graphs["P3"], 1, Family.TREE)
    memo = MemoTable()
    evaluate_on_expression(f, e, memo)
    root = next(formula for node, formula in memo.values if node == id(e))
    with pytest.raises(KeyError):
        memo.store(e, root, True)


@pytest.mark.parametrize("G", corpus.loop_graphs())
def test_loop_graphs(G):
    expected = corpus.has_loop_edge(G)
    f = corpus.has_loop(3)
    for family in (Family.TREE, Family.GENERIC):
        value, _ = check(G, f, 2, family)
        assert value == expected


@pytest.mark.parametrize("family", [Family.TREE, Family.PATH])
def test_agrees_with_oracle_on_tiny_graphs(tiny_graphs, family):
    sentences = {name: corpus.sentence(name) for name in FAST}
    for G in tiny_graphs[::4]:
        k = smallest_width(G, family)
        for name, f in sentences.items():
            value, _ = check(G, f, k, family)
            assert value == eval_circuit(f, G), (name, G.summary(), G.terminals)


@pytest.mark.slow
@pytest.mark.parametrize("engine", [EngineKind.INDUCTIVE, EngineKind.AUTOMATON])
@pytest.mark.parametrize("family", FAMILIES)
def test_agrees_with_oracle_on_the_corpus(tiny_graphs, engine, family):
    sentences = corpus.circuit_corpus()
    for G in tiny_graphs:
        k = smallest_width(G, family)
        for name, f in sentences.items():
            value, _ = check(G, f, k, family, engine=engine)
            assert value == eval_circuit(f, G), (name, G.summary(), G.terminals)


@pytest.mark.slow
def test_tree_pipeline_agrees_with_oracle_on_small_graphs():
    sentences = corpus.circuit_corpus()
    graphs = list(corpus.small_graphs(4, 4, 2))
    assert len(graphs) > 100
    for G in graphs:
        k = smallest_width(G, Family.TREE)
        for name, f in sentences.items():
            value, _ = check(G, f, k, Family.TREE)
            assert value == eval_circuit(f, G), (name, G.summary(), G.terminals)

import pytest

from models.errors import AssignmentIncomplete, SizeLimitExceeded, SortError
from models.formulas import Sort, Var
from models.graph import TypedGraph
from services import corpus
from services.formula_parser import parse_circuit, parse_direct
from services.graph_ops import edge_graph, redefine, vertex_graph
from services.semantics import all_assignments, eval_circuit, eval_direct, metrics


def test_has_edge(named_graphs):
    f = corpus.sentence("has_edge")
    assert eval_circuit(f, named_graphs["P3"])
    assert not eval_circuit(f, TypedGraph(vertices=("v0", "v1")))


@pytest.mark.parametrize("graph,expected", [("P3", False), ("P4", True), ("C5", False), ("C6", True)])
def test_even_vertices(named_graphs, graph, expected):
    assert eval_circuit(corpus.sentence("even_vertices"), named_graphs[graph]) is expected
    assert eval_direct(corpus.direct_corpus()["even_vertices"], named_graphs[graph]) is expected


@pytest.mark.parametrize("graph,expected", [
    ("P5", True), ("C4", True), ("C6", True), ("C3", False), ("C5", False), ("K4", False),
])
def test_two_colourable(named_graphs, graph, expected):
    assert eval_direct(corpus.sentence("two_colourable"), named_graphs[graph]) is expected


def test_three_colourable(named_graphs):
    f = corpus.sentence("three_colourable")
    assert eval_direct(f, named_graphs["C5"])
    assert not eval_direct(f, named_graphs["K4"])


def test_triangle(named_graphs):
    f = corpus.sentence("triangle")
    assert eval_circuit(f, named_graphs["C3"])
    assert not eval_circuit(f, named_graphs["C4"])


def test_terminal_terms():
    G = redefine(edge_graph(2), (1, 1))
    assert eval_circuit(corpus.sentence("terminals_coincide"), G)
    assert not eval_circuit(corpus.sentence("terminals_distinct"), G)
    assert eval_circuit(corpus.sentence("t1_t2_adjacent"), edge_graph(2))


def test_terms_ignore_missing_terminals():
    f = parse_circuit("sgl(term{1,2}(empty))")
    assert eval_circuit(f, vertex_graph())


def test_free_variables():
    f = parse_circuit("sgl(X)", {"X": "V"})
    G = corpus.path_graph(2)
    assert eval_circuit(f, G, {"X": ["v0"]})
    assert not eval_circuit(f, G, {"X": ["v0", "v1"]})
    assert not eval_circuit(f, G, {"X": []})


def test_connectivity_follows_word_order():
    f = parse_circuit("conn2(S, X, Y)", {"S": "E", "X": "V", "Y": "V"})
    G = corpus.path_graph(2)
    assert eval_circuit(f, G, {"S": ["e0"], "X": ["v0"], "Y": ["v1"]})
    assert not eval_circuit(f, G, {"S": ["e0"], "X": ["v1"], "Y": ["v0"]})
    assert not eval_circuit(f, G, {"S": [], "X": ["v0"], "Y": ["v1"]})


def test_element_values():
    f = parse_direct("in(x, X)", {"x": "v", "X": "V"})
    G = corpus.path_graph(3)
    assert eval_direct(f, G, {"x": "v1", "X": ["v1", "v2"]})
    assert not eval_direct(f, G, {"x": "v0", "X": ["v1", "v2"]})
    with pytest.raises(SortError):
        eval_direct(f, G, {"x": ["v0", "v1"], "X": []})


def test_missing_assignment():
    with pytest.raises(AssignmentIncomplete):
        eval_circuit(parse_circuit("sgl(X)", {"X": "V"}), vertex_graph())


def test_unknown_identifier_in_assignment():
    with pytest.raises(SortError):
        eval_circuit(parse_circuit("sgl(X)", {"X": "V"}), vertex_graph(), {"X": ["e0"]})


def test_size_limit_only_for_set_quantifiers():
    K6 = corpus.complete_graph(6)
    with pytest.raises(SizeLimitExceeded):
        eval_circuit(corpus.sentence("has_edge"), K6)
    assert eval_direct(corpus.sentence("distinct_pair"), K6)
    assert eval_circuit(corpus.sentence("has_edge"), K6, limit=30)


def test_all_assignments_counts():
    G = corpus.path_graph(2)
    variables = [Var("X", Sort.VSET), Var("S", Sort.ESET)]
    assignments = list(all_assignments(variables, G))
    assert len(assignments) == 8
    assert {"X": (), "S": ()} in assignments
    elements = list(all_assignments([Var("x", Sort.VERTEX)], G))
    assert elements == [{"x": ("v0",)}, {"x": ("v1",)}]


def test_metrics():
    m = metrics(corpus.sentence("two_vertices"))
    assert (m.width, m.max_var_index, m.max_conn_arity, m.max_card_modulus) == (2, 2, 0, 0)
    m = metrics(corpus.sentence("two_colourable"))
    assert m.width == 3
    assert m.max_conn_arity == 2
    assert m.free_vars == []
    m = metrics(parse_circuit("card(X, 1, 3) & sgl(Y)", {"X": "V", "Y": "V"}))
    assert m.width == 0
    assert m.max_card_modulus == 3
    assert m.free_vars == ["X", "Y"]


def test_max_var_index_counts_names_not_binders():
    f = parse_circuit("(forall X:V. sub(X, Y)) & (forall X:V. !sgl(X)) & sgl(Y)", {"Y": "V"})
    m = metrics(f)
    assert (m.width, m.max_var_index) == (1, 2)
    assert "max_var_index" in m.model_dump()

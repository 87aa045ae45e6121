import pytest

from models.formulas import And, Forall, Sort, Sub, Var
from services import corpus
from services.formula_parser import parse_direct
from services.semantics import all_assignments, eval_circuit, eval_direct
from services.translation import induced_assignment, is_circuitous, lift_var, translate


def test_equality_becomes_mutual_inclusion():
    f = parse_direct("x = y", {"x": "v", "y": "v"})
    X, Y = Var("x", Sort.VSET), Var("y", Sort.VSET)
    assert translate(f) == And((Sub(X, Y), Sub(Y, X)))


def test_element_quantifiers_are_relativized():
    f = translate(parse_direct("forall e:e. sgl(e)"))
    assert isinstance(f, Forall)
    assert f.var == Var("e", Sort.ESET)
    assert is_circuitous(f)


def test_lift_var():
    assert lift_var(Var("x", Sort.VERTEX)) == Var("x", Sort.VSET)
    assert lift_var(Var("S", Sort.ESET)) == Var("S", Sort.ESET)


@pytest.mark.parametrize("name", sorted(corpus.CIRCUIT_SENTENCES))
def test_circuit_sentences_are_fixed_points(name):
    f = corpus.sentence(name)
    assert is_circuitous(f)
    assert translate(f) == f


@pytest.mark.parametrize("name", sorted(corpus.DIRECT_SENTENCES))
def test_translation_is_circuitous_and_stable(name):
    g = translate(corpus.direct_corpus()[name])
    assert is_circuitous(g)
    assert translate(g) == g


def test_element_sorts_are_not_circuitous():
    assert not is_circuitous(corpus.direct_corpus()["distinct_pair"])
    assert not is_circuitous(parse_direct("forall x:v. in(x, X)", {"X": "V"}))


def test_induced_assignment():
    assert induced_assignment({"x": "v0", "X": ["v0", "v1"]}) == {"x": ("v0",), "X": ("v0", "v1")}
    assert induced_assignment(None) == {}


def test_free_variables_agree():
    f = parse_direct("in(x, X) & !(x = y)", {"x": "v", "y": "v", "X": "V"})
    g = translate(f)
    G = corpus.path_graph(3)
    for tau in all_assignments(f.free_vars, G):
        assert eval_direct(f, G, tau) == eval_circuit(g, G, induced_assignment(tau))


def _agreement(graphs):
    sentences = corpus.direct_corpus()
    translated = {name: translate(f) for name, f in sentences.items()}
    for G in graphs:
        for name, f in sentences.items():
            assert eval_direct(f, G) == eval_circuit(translated[name], G), (name, G.summary())


def test_translation_agrees_on_tiny_graphs():
    _agreement(corpus.small_graphs(max_vertices=3, max_edges=3, max_type=1))


@pytest.mark.slow
def test_translation_agrees_on_small_graphs():
    _agreement(corpus.small_graphs(max_vertices=4, max_edges=4, max_type=2))

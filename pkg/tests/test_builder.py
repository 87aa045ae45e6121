import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from models.decompositions import Decomposition
from models.errors import DecompositionInvalid, JoinNodePresent, NotVerdant
from models.expressions import LoopConst, SignatureProfile, Sprout, Twine
from models.schemas import DecompositionKind, Family
from services import builder, corpus, decomposer
from services.algebra import evaluate, locality, symbols_of, validate
from services.engine import build_expression, prepare_decomposition
from services.fuzzer import smallest_width
from services.graph_ops import is_isomorphic


def _round_trip(G, k, family):
    e, _ = build_expression(G, k, family)
    assert is_isomorphic(evaluate(e, loops=G.loops), G)
    return e


@pytest.mark.parametrize("family", [Family.TREE, Family.PATH])
@pytest.mark.parametrize("name,k", [("P5", 1), ("C4", 2), ("C6", 2), ("K4", 3), ("star3", 1)])
def test_named_graphs(named_graphs, family, name, k):
    G = named_graphs[name]
    e = _round_trip(G, k, family)
    assert validate(e, SignatureProfile(family, k)) == []
    assert max(locality(e)) <= k + 1


@pytest.mark.parametrize("name", ["P3", "C5", "K4"])
def test_generic(named_graphs, name):
    G = named_graphs[name]
    e = builder.build_generic(G)
    assert is_isomorphic(evaluate(e), G)
    assert validate(e, SignatureProfile(Family.GENERIC, len(G.vertices) + len(G.edges))) == []


def test_tree_letters(named_graphs):
    e = _round_trip(named_graphs["C5"], 2, Family.TREE)
    assert any(isinstance(s, Twine) for s in symbols_of(e))
    assert not any(isinstance(s, Sprout) for s in symbols_of(e))


def test_terminals_are_respected():
    G = corpus.from_networkx(nx.path_graph(4), [3, 0])
    for family in (Family.TREE, Family.PATH):
        e = _round_trip(G, 2, family)
        assert e.out_type == 2


def test_repeated_terminals():
    G = corpus.from_networkx(nx.path_graph(3), [1, 1, 1])
    for family in (Family.TREE, Family.PATH, Family.GENERIC):
        assert _round_trip(G, 1, family).out_type == 3


@pytest.mark.parametrize("G", corpus.loop_graphs()[:4])
def test_loops(G):
    for family in (Family.TREE, Family.PATH, Family.GENERIC):
        _round_trip(G, 2, family)
    e, _ = build_expression(G, 2, Family.TREE)
    assert any(isinstance(s, LoopConst) for s in symbols_of(e))


def test_directed_hyperedges():
    G = corpus.random_graph(np.random.default_rng(7), 5, 4, directed=True, max_arity=3)
    for family in (Family.TREE, Family.PATH, Family.GENERIC):
        _round_trip(G, smallest_width(G, family), family)


def test_edgeless_graphs_with_width_zero():
    G = corpus.from_networkx(nx.empty_graph(3))
    for family in (Family.TREE, Family.PATH):
        _round_trip(G, 0, family)


def _random_round_trip(seed, loops, directed, max_vertices):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_vertices + 1))
    G = corpus.random_graph(rng, n, int(rng.integers(0, 2 * n + 1)), loops=loops, directed=directed,
                            max_arity=3, terminals=int(rng.integers(0, 3)))
    for family in (Family.TREE, Family.PATH):
        k = smallest_width(G, family)
        e = _round_trip(G, k, family)
        if not loops:
            assert max(locality(e)) <= max(k + 1, G.type)
    _round_trip(G, 0, Family.GENERIC)


@hyp_settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), loops=st.booleans(), directed=st.booleans())
def test_random_round_trips(seed, loops, directed):
    _random_round_trip(seed, loops, directed, 6)


@pytest.mark.slow
@hyp_settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), loops=st.booleans(), directed=st.booleans())
def test_many_random_round_trips(seed, loops, directed):
    _random_round_trip(seed, loops, directed, 8)


class TestEdgeAssignment:

    def test_each_edge_once(self, named_graphs):
        G = named_graphs["K4"]
        D = prepare_decomposition(G, 3, Family.TREE)
        owner = builder.assign_edges(G, D)
        placed = [e for edges in owner.values() for e in edges]
        assert sorted(placed) == sorted(G.edges)

    def test_edge_goes_to_bag_holding_it(self, named_graphs):
        G = named_graphs["C5"]
        D = prepare_decomposition(G, 2, Family.TREE)
        for node, edges in builder.assign_edges(G, D).items():
            for edge in edges:
                assert set(G.word(edge)) <= D.bags[node]


class TestPreconditions:

    def _path_decomposition(self):
        G = corpus.path_graph(3)
        bags = {"a": frozenset({"v0", "v1"}), "b": frozenset({"v1", "v2"})}
        return G, Decomposition(DecompositionKind.PATH, ("a", "b"), bags, (("a", "b"),), root="a")

    def test_tree_builder_needs_nice(self):
        G, D = self._path_decomposition()
        with pytest.raises(DecompositionInvalid):
            builder.build_treewidth(G, D, 1)

    def test_width_bound(self):
        G, D = self._path_decomposition()
        with pytest.raises(NotVerdant):
            builder.build_treewidth(G, decomposer.make_nice(D), 0)

    def test_path_builder_rejects_joins(self):
        G = corpus.star_graph(3)
        bags = {
            "r": frozenset({"v0", "v1"}), "x": frozenset({"v0", "v2"}), "y": frozenset({"v0", "v3"}),
        }
        D = Decomposition(DecompositionKind.TREE, ("r", "x", "y"), bags, (("r", "x"), ("r", "y")), root="r")
        with pytest.raises(JoinNodePresent):
            builder.build_pathwidth(G, decomposer.make_nice(D), 1)

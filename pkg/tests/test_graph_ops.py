import networkx as nx
import pytest

from models.errors import (
    IndexOutOfRange, InvalidArity, InvalidGraph, LoopCreated, NotSurjective, OrientationMismatch,
    TypeTooLarge, UnknownId,
)
from models.graph import TypedGraph
from services import corpus
from services.graph_ops import (
    adjacent, bloom, canonicalize_ids, collapse, degree, disjoint_sum, edge_graph, fuse, in_degree,
    incidence, is_isomorphic, loop_graph, neighbours, out_degree, primal_graph, redefine, sprout, twine,
    twine_sigma, vertex_graph,
)


class TestConstants:

    def test_vertex_graph(self):
        G = vertex_graph()
        assert G.vertices == ("v0",)
        assert G.type == 1
        assert G.edges == ()

    def test_edge_graph_terminals_follow_word(self):
        G = edge_graph(3)
        assert G.terminals == ("v0", "v1", "v2")
        assert G.word("e0") == ("v0", "v1", "v2")
        assert not G.directed

    def test_edge_graph_directed(self):
        G = edge_graph(3, start=1)
        assert G.directed
        assert G.start("e0") == 1

    def test_edge_graph_needs_a_vertex(self):
        with pytest.raises(InvalidArity):
            edge_graph(0)

    def test_loop_graph(self):
        G = loop_graph((1, 2, 1))
        assert G.loops
        assert G.vertices == ("v0", "v1")
        assert G.word("e0") == ("v0", "v1", "v0")

    def test_loop_graph_must_cover_indices(self):
        with pytest.raises(NotSurjective):
            loop_graph((1, 3))


class TestTypedGraph:

    def test_repeated_endpoint_needs_loop_mode(self):
        with pytest.raises(LoopCreated):
            TypedGraph(vertices=("a",), edges=("e",), endpoints=(("a", "a"),))

    def test_unknown_endpoint(self):
        with pytest.raises(InvalidGraph):
            TypedGraph(vertices=("a",), edges=("e",), endpoints=(("a", "b"),))

    def test_shared_identifier(self):
        with pytest.raises(InvalidGraph):
            TypedGraph(vertices=("a", "e"), edges=("e",), endpoints=(("a",),))

    def test_split_index_range(self):
        with pytest.raises(InvalidGraph):
            TypedGraph(vertices=("a", "b"), edges=("e",), endpoints=(("a", "b"),), orientation=(2,))


class TestOperations:

    def test_disjoint_sum_renames_right_collisions(self):
        G = disjoint_sum(vertex_graph(), vertex_graph())
        assert G.vertices == ("v0", "v0.1")
        assert G.terminals == ("v0", "v0.1")

    def test_disjoint_sum_orientation(self):
        with pytest.raises(OrientationMismatch):
            disjoint_sum(edge_graph(2), edge_graph(2, start=1))
        G = disjoint_sum(vertex_graph(), edge_graph(2, start=1))
        assert G.orientation == (1,)

    def test_redefine(self):
        G = redefine(edge_graph(3), (3, 1))
        assert G.terminals == ("v2", "v0")
        assert redefine(edge_graph(3), ()).type == 0

    def test_redefine_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            redefine(edge_graph(3), (4,))

    def test_fuse_keeps_first_terminal(self):
        G = disjoint_sum(edge_graph(2), edge_graph(2))
        F = fuse(G, 2, 3)
        assert F.vertices == ("v0", "v1", "v1.1")
        assert F.endpoints == (("v0", "v1"), ("v1", "v1.1"))
        assert F.terminals == ("v0", "v1", "v1", "v1.1")
        assert F.type == 4

    def test_fuse_same_vertex_is_identity(self):
        G = redefine(edge_graph(2), (1, 1, 2))
        assert fuse(G, 1, 2) is G

    def test_fuse_refuses_loops_in_loopfree_mode(self):
        with pytest.raises(LoopCreated):
            fuse(edge_graph(2), 1, 2)

    def test_fuse_in_loop_mode(self):
        F = fuse(edge_graph(2, loops=True), 1, 2)
        assert F.vertices == ("v0",)
        assert F.endpoints == (("v0", "v0"),)

    def test_twine_builds_a_path(self):
        G = twine(edge_graph(2), edge_graph(2), [2], 3)
        assert len(G.vertices) == 3
        assert len(G.edges) == 2
        assert G.terminals == ("v0", "v1", "v0.1")
        assert nx.is_isomorphic(primal_graph(G), nx.path_graph(3))

    def test_twine_sigma(self):
        assert twine_sigma(2, 2, (1,), 3) == (1, 2, 4)
        assert twine_sigma(2, 2, (2,), 3) == (1, 2, 3)

    def test_twine_type_bound(self):
        with pytest.raises(TypeTooLarge):
            twine(edge_graph(2), edge_graph(2), [1, 2], 3)

    def test_twine_index_bound(self):
        with pytest.raises(IndexOutOfRange):
            twine(edge_graph(2), vertex_graph(), [2], 1)

    def test_sprout(self):
        G = sprout(edge_graph(2))
        assert G.type == 3
        assert len(G.vertices) == 3
        assert len(G.edges) == 1

    def test_bloom_adds_edge_over_first_terminals(self):
        G = bloom(sprout(sprout(vertex_graph())), 2)
        assert G.type == 3
        assert G.endpoints == ((G.terminal(1), G.terminal(2)),)

    def test_bloom_arity(self):
        with pytest.raises(IndexOutOfRange):
            bloom(sprout(vertex_graph()), 3)

    def test_collapse_only_adjacent(self):
        apart = disjoint_sum(vertex_graph(), vertex_graph())
        assert collapse(apart, 1, 2) is apart
        joined = collapse(edge_graph(2, loops=True), 1, 2)
        assert len(joined.vertices) == 1

    def test_canonicalize_ids(self):
        G = canonicalize_ids(disjoint_sum(edge_graph(2), edge_graph(2)), "x", "f")
        assert G.vertices == ("x0", "x1", "x2", "x3")
        assert G.edges == ("f0", "f1")
        assert G.endpoints == (("x0", "x1"), ("x2", "x3"))


class TestQueries:

    def test_degree_and_neighbours(self):
        C4 = corpus.cycle_graph(4)
        assert degree(C4, "v0") == 2
        assert neighbours(C4, "v0") == {"v1", "v3"}
        assert adjacent(C4, "v0", "v1")
        assert not adjacent(C4, "v0", "v2")

    def test_loops_count_twice(self):
        G = loop_graph((1, 1, 2))
        assert degree(G, "v0") == 2
        assert incidence(G, "v0", "e0") == 2
        assert "v0" in neighbours(G, "v0")
        assert adjacent(G, "v0", "v0")

    def test_directed_degrees(self):
        G = edge_graph(3, start=1)
        assert in_degree(G, "v0") == 1
        assert out_degree(G, "v0") == 0
        assert out_degree(G, "v2") == 1

    def test_unknown_ids(self):
        with pytest.raises(UnknownId):
            degree(vertex_graph(), "v9")
        with pytest.raises(UnknownId):
            incidence(vertex_graph(), "v0", "e9")

    def test_primal_graph_of_hyperedge(self):
        P = primal_graph(edge_graph(3))
        assert P.number_of_edges() == 3


class TestIsomorphism:

    def test_relabelled_cycle(self):
        C4 = corpus.cycle_graph(4)
        renamed = TypedGraph(
            vertices=("d", "c", "b", "a"),
            edges=("x", "y", "z", "w"),
            endpoints=(("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")),
        )
        assert is_isomorphic(C4, renamed)

    def test_cycle_is_not_path(self):
        assert not is_isomorphic(corpus.cycle_graph(4), corpus.path_graph(4))

    def test_terminals_matter(self):
        end = corpus.from_networkx(nx.path_graph(3), [0])
        middle = corpus.from_networkx(nx.path_graph(3), [1])
        assert not is_isomorphic(end, middle)
        assert is_isomorphic(end, corpus.from_networkx(nx.path_graph(3), [2]))

    def test_endpoint_order_inside_undirected_edges_is_free(self):
        G = TypedGraph(vertices=("a", "b"), edges=("e",), endpoints=(("a", "b"),))
        H = TypedGraph(vertices=("a", "b"), edges=("e",), endpoints=(("b", "a"),))
        assert is_isomorphic(G, H)

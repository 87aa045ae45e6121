"""Named sentences and small graph families"""
import logging
from itertools import combinations, product
from typing import Dict, Iterable, Iterator, List, Optional, Sequence

import networkx as nx

from models.formulas import Formula
from models.graph import TypedGraph
from services.formula_parser import parse_circuit, parse_direct

logger = logging.getLogger(__name__)


# Circuitous sentences of width at most 2, at most 3 variables,
# connectivity arity at most 2 and moduli at most 3
CIRCUIT_SENTENCES: Dict[str, str] = {
    "has_edge": "exists S:E. sgl(S)",
    "edgeless": "forall S:E. sub(S, empty)",
    "one_vertex": "forall X:V. forall Y:V. sgl(X) & sgl(Y) -> sub(X, Y)",
    "two_vertices": "exists X:V. exists Y:V. sgl(X) & sgl(Y) & !sub(X, Y)",
    "even_vertices": "forall X:V. (forall Y:V. sub(Y, X)) -> card(X, 0, 2)",
    "odd_vertices": "exists X:V. (forall Y:V. sub(Y, X)) & card(X, 1, 2)",
    "vertices_mod3": "exists X:V. (forall Y:V. sub(Y, X)) & card(X, 0, 3)",
    "even_edges": "exists S:E. (forall F:E. sub(F, S)) & card(S, 0, 2)",
    "edges_mod3_one": "exists S:E. (forall F:E. sub(F, S)) & card(S, 1, 3)",
    "has_binary_edge": "exists S:E. exists X:V. conn2(S, X, X)",
    "has_unary_edge": "exists S:E. exists X:V. conn1(S, X)",
    "has_pinched_edge": "exists S:E. exists X:V. sgl(X) & conn2(S, X, X)",
    "all_edges_binary": "forall S:E. sgl(S) -> (exists X:V. conn2(S, X, X))",
    "at_most_one_edge": "forall S:E. forall F:E. sgl(S) & sgl(F) -> sub(S, F)",
    "odd_set_spans_edge": "exists X:V. card(X, 1, 2) & (exists S:E. conn2(S, X, X))",
    "odd_independent_set": "exists X:V. card(X, 1, 2) & (forall S:E. !conn2(S, X, X))",
    "t1_has_neighbour": "exists S:E. exists X:V. conn2(S, term{1}(empty), X) | conn2(S, X, term{1}(empty))",
    "t1_t2_adjacent": "exists S:E. conn2(S, term{1}(empty), term{2}(empty)) | conn2(S, term{2}(empty), term{1}(empty))",
    "terminals_distinct": "!sub(term{1}(empty), term{2}(empty))",
    "terminals_coincide": "sgl(term{1,2}(empty))",
    "even_nonterminals": "exists X:V. (forall Y:V. sub(Y, term{1}(X))) & !sub(term{1}(empty), X) & card(X, 0, 2)",
    "singletons_mod3": "forall X:V. sgl(X) -> card(X, 1, 3)",
}

DIRECT_SENTENCES: Dict[str, str] = {
    "two_colourable": (
        "exists X:V. exists Y:V. (forall z:v. in(z, X) | in(z, Y))"
        " & (forall e:e. !conn2(e, X, X) & !conn2(e, Y, Y))"
    ),
    "three_colourable": (
        "exists X:V. exists Y:V. exists W:V. (forall z:v. in(z, X) | in(z, Y) | in(z, W))"
        " & (forall e:e. !conn2(e, X, X) & !conn2(e, Y, Y) & !conn2(e, W, W))"
    ),
    "triangle": (
        "exists S:E. exists X:V. exists Y:V. exists Z:V. sgl(X) & sgl(Y) & sgl(Z)"
        " & !sub(X, Y) & !sub(Y, Z) & !sub(X, Z)"
        " & (conn2(S, X, Y) | conn2(S, Y, X)) & (conn2(S, Y, Z) | conn2(S, Z, Y))"
        " & (conn2(S, X, Z) | conn2(S, Z, X))"
    ),
    "has_edge": "exists e:e. exists x:v. exists y:v. conn2(e, x, y)",
    "has_unary_edge": "exists e:e. exists x:v. conn1(e, x)",
    "has_two_loop": "exists e:e. exists x:v. conn2(e, x, x)",
    "distinct_pair": "exists x:v. exists y:v. !(x = y)",
    "even_vertices": "exists X:V. (forall x:v. in(x, X)) & card(X, 0, 2)",
    "vertices_mod3_two": "exists X:V. (forall x:v. in(x, X)) & card(X, 2, 3)",
    "odd_edges": "exists S:E. (forall e:e. in(e, S)) & card(S, 1, 2)",
    "isolated_vertex": "exists x:v. forall e:e. forall y:v. !conn2(e, x, y) & !conn2(e, y, x)",
    "no_isolated_vertex": "forall x:v. exists e:e. exists y:v. conn2(e, x, y) | conn2(e, y, x)",
    "independent_pair": "exists x:v. exists y:v. !(x = y) & (forall e:e. !conn2(e, x, y) & !conn2(e, y, x))",
    "dominating_vertex": "exists x:v. forall y:v. x = y | (exists e:e. conn2(e, x, y) | conn2(e, y, x))",
    "t1_isolated": "forall e:e. forall y:v. !conn2(e, term{1}(empty), y) & !conn2(e, y, term{1}(empty))",
    "t1_in_edge_with_t2": "exists e:e. conn2(e, term{1}(empty), term{2}(empty)) | conn2(e, term{2}(empty), term{1}(empty))",
    "parallel_edges": "exists e:e. exists f:e. !(e = f) & (exists x:v. exists y:v. conn2(e, x, y) & conn2(f, x, y))",
    "odd_closed_set": (
        "exists X:V. card(X, 1, 2) & (forall e:e. forall x:v. forall y:v."
        " (conn2(e, x, y) | conn2(e, y, x)) & in(x, X) -> in(y, X))"
    ),
    "edge_set_parity": "forall S:E. (forall e:e. in(e, S)) -> card(S, 0, 2) | card(S, 1, 2)",
    "element_equality": "forall x:v. forall y:v. x = y | !(x = y)",
    "path_of_length_two": (
        "exists x:v. exists y:v. exists z:v. !(x = z)"
        " & (exists e:e. conn2(e, x, y) | conn2(e, y, x)) & (exists f:e. conn2(f, y, z) | conn2(f, z, y))"
    ),
}


def has_loop_text(max_arity: int) -> str:
    """Circuitous sentence: some edge of arity at most max_arity visits a vertex twice"""
    cases = []
    for r in range(2, max_arity + 1):
        for i, j in combinations(range(r), 2):
            args = ["X" if p in (i, j) else "U" for p in range(r)]
            cases.append(f"conn{r}(F, {', '.join(args)})")
    body = " | ".join(cases) if cases else "false"
    return f"exists F:E. exists X:V. exists U:V. sgl(X) & ({body})"


def has_loop(max_arity: int) -> Formula:
    return parse_circuit(has_loop_text(max_arity))


CIRCUIT_SENTENCES["has_loop"] = has_loop_text(3)
CIRCUIT_SENTENCES["contradiction"] = "exists S:E. sgl(S) & !sgl(S)"


def circuit_corpus() -> Dict[str, Formula]:
    return {name: parse_circuit(text) for name, text in CIRCUIT_SENTENCES.items()}


def direct_corpus() -> Dict[str, Formula]:
    return {name: parse_direct(text) for name, text in DIRECT_SENTENCES.items()}


def sentence(name: str) -> Formula:
    """A named sentence; direct sentences are returned untranslated"""
    if name in CIRCUIT_SENTENCES:
        return parse_circuit(CIRCUIT_SENTENCES[name])
    if name in DIRECT_SENTENCES:
        return parse_direct(DIRECT_SENTENCES[name])
    raise KeyError(f"Unknown sentence {name!r}; known: {sorted(CIRCUIT_SENTENCES) + sorted(DIRECT_SENTENCES)}")


# Graph families

def from_networkx(G: nx.Graph, terminals: Sequence[int] = (), directed: bool = False) -> TypedGraph:
    """Typed graph of a networkx graph; nodes become v0.. in sorted order, edges e0.. in edge order"""
    order = sorted(G.nodes)
    name = {u: f"v{i}" for i, u in enumerate(order)}
    position = {u: i for i, u in enumerate(order)}
    words = []
    for u, v in G.edges():
        if not directed and position[v] < position[u]:
            u, v = v, u
        words.append((name[u], name[v]))
    return TypedGraph(
        vertices=tuple(name[u] for u in order),
        edges=tuple(f"e{i}" for i in range(len(words))),
        endpoints=tuple(words),
        terminals=tuple(name[order[t]] for t in terminals),
        orientation=(1,) * len(words) if directed else None,
    )


def path_graph(n: int) -> TypedGraph:
    return from_networkx(nx.path_graph(n))


def cycle_graph(n: int) -> TypedGraph:
    return from_networkx(nx.cycle_graph(n))


def complete_graph(n: int) -> TypedGraph:
    return from_networkx(nx.complete_graph(n))


def star_graph(leaves: int) -> TypedGraph:
    return from_networkx(nx.star_graph(leaves))


def grid_graph(rows: int, columns: int) -> TypedGraph:
    return from_networkx(nx.convert_node_labels_to_integers(nx.grid_2d_graph(rows, columns)))


def caterpillar(spine: int, legs: int = 1) -> TypedGraph:
    """A path of ``spine`` vertices with ``legs`` pendant vertices on each"""
    G = nx.path_graph(spine)
    for s in range(spine):
        for j in range(legs):
            leaf = spine + s * legs + j
            G.add_edge(s, leaf)
    return from_networkx(G)


def terminal_choices(vertex_count: int, max_type: int) -> Iterator[tuple]:
    """Every terminal index sequence of length 0..max_type"""
    for n in range(max_type + 1):
        yield from product(range(vertex_count), repeat=n)


def small_graphs(max_vertices: int = 4, max_edges: int = 4, max_type: int = 2) -> Iterator[TypedGraph]:
    """Loop-free 2-uniform typed graphs up to isomorphism of the underlying graph"""
    for G in nx.graph_atlas_g():
        if G.number_of_nodes() == 0:
            continue
        if G.number_of_nodes() > max_vertices:
            break
        if G.number_of_edges() > max_edges:
            continue
        for terminals in terminal_choices(G.number_of_nodes(), max_type):
            yield from_networkx(G, terminals)


def loop_graphs() -> List[TypedGraph]:
    """Graphs with loop edges, plus loop-free controls"""
    def graph(vertices: Iterable[str], words: Iterable[tuple], loops: bool = True) -> TypedGraph:
        words = tuple(words)
        return TypedGraph(
            vertices=tuple(vertices),
            edges=tuple(f"e{i}" for i in range(len(words))),
            endpoints=words,
            loops=loops,
        )

    return [
        graph(["v0"], [("v0", "v0")]),
        graph(["v0", "v1"], [("v0", "v1"), ("v1", "v1")]),
        graph(["v0", "v1"], [("v0", "v1", "v0")]),
        graph(["v0", "v1", "v2"], [("v0", "v1"), ("v1", "v2"), ("v2", "v2", "v2")]),
        graph(["v0", "v1"], [("v0", "v1")], loops=True),
        graph(["v0", "v1", "v2"], [("v0", "v1"), ("v1", "v2")], loops=True),
    ]


def has_loop_edge(G: TypedGraph) -> bool:
    return any(len(set(word)) < len(word) for word in G.endpoints)


def random_graph(rng, vertices: int, edges: int, loops: bool = False, directed: bool = False,
                 max_arity: int = 2, terminals: int = 0) -> TypedGraph:
    """Random typed graph drawn with a numpy Generator"""
    names = tuple(f"v{i}" for i in range(vertices))
    words = []
    for _ in range(edges):
        arity = int(rng.integers(1, max_arity + 1))
        if loops:
            word = tuple(names[int(i)] for i in rng.integers(0, vertices, size=arity))
        else:
            arity = min(arity, vertices)
            word = tuple(names[int(i)] for i in rng.choice(vertices, size=arity, replace=False))
        words.append(word)
    orientation: Optional[tuple] = None
    if directed:
        words = [w for w in words if len(w) >= 2]
        orientation = tuple(int(rng.integers(1, len(w))) for w in words)
    return TypedGraph(
        vertices=names,
        edges=tuple(f"e{i}" for i in range(len(words))),
        endpoints=tuple(words),
        terminals=tuple(names[int(i)] for i in rng.integers(0, vertices, size=terminals)),
        orientation=orientation,
        loops=loops,
    )

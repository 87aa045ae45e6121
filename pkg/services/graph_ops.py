"""Graph-building operations of the algebra and basic graph queries.

Terminal indices are 1-based everywhere, matching the expression syntax.
"""
import logging
from collections import Counter
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from config import settings
from models.errors import (
    IndexOutOfRange, InvalidArity, LoopCreated, NotSurjective,
    OrientationMismatch, SizeLimitExceeded, TypeTooLarge, UnknownId,
)
from models.graph import TypedGraph

logger = logging.getLogger(__name__)


# Constants

def vertex_graph(loops: bool = False) -> TypedGraph:
    """The graph with one vertex, no edges and that vertex as its only terminal"""
    return TypedGraph(vertices=("v0",), terminals=("v0",), loops=loops)


def edge_graph(n: int, start: Optional[int] = None, loops: bool = False) -> TypedGraph:
    """n distinct vertices joined by one edge, every vertex terminal in word order"""
    if n < 1:
        raise InvalidArity(f"Edge graphs need at least one vertex, got {n}")
    vertices = tuple(f"v{i}" for i in range(n))
    return TypedGraph(
        vertices=vertices,
        edges=("e0",),
        endpoints=(vertices,),
        terminals=vertices,
        orientation=None if start is None else (start,),
        loops=loops,
    )


def loop_graph(word: Sequence[int], start: Optional[int] = None) -> TypedGraph:
    """One edge whose word is ``word`` read over terminals 1..n"""
    if not word:
        raise InvalidArity("Loop words must be nonempty")
    n = max(word)
    missing = sorted(set(range(1, n + 1)) - set(word))
    if min(word) < 1 or missing:
        raise NotSurjective(f"Loop word {list(word)} does not cover 1..{n}, missing {missing}")
    vertices = tuple(f"v{i}" for i in range(n))
    return TypedGraph(
        vertices=vertices,
        edges=("e0",),
        endpoints=(tuple(vertices[i - 1] for i in word),),
        terminals=vertices,
        orientation=None if start is None else (start,),
        loops=True,
    )


# Basic operations

def _merged_orientation(G: TypedGraph, H: TypedGraph) -> Optional[Tuple[int, ...]]:
    if G.orientation is None and H.orientation is None:
        return None
    if G.orientation is None and G.edges:
        raise OrientationMismatch("Cannot combine an undirected graph with edges and a directed graph")
    if H.orientation is None and H.edges:
        raise OrientationMismatch("Cannot combine a directed graph and an undirected graph with edges")
    return (G.orientation or ()) + (H.orientation or ())


def _fresh(name: str, used: Set[str]) -> str:
    i = 1
    candidate = f"{name}.{i}"
    while candidate in used:
        i += 1
        candidate = f"{name}.{i}"
    return candidate


def disjoint_sum(G: TypedGraph, H: TypedGraph) -> TypedGraph:
    """Side-by-side union; colliding identifiers of the right operand are renamed"""
    used = set(G.vertices) | set(G.edges)
    own = set(H.vertices) | set(H.edges)
    rename: Dict[str, str] = {}
    for x in H.vertices + H.edges:
        if x in used:
            new = _fresh(x, used | own)
            rename[x] = new
            used.add(new)
        else:
            used.add(x)
    r = lambda x: rename.get(x, x)
    return TypedGraph(
        vertices=G.vertices + tuple(r(v) for v in H.vertices),
        edges=G.edges + tuple(r(e) for e in H.edges),
        endpoints=G.endpoints + tuple(tuple(r(v) for v in word) for word in H.endpoints),
        terminals=G.terminals + tuple(r(v) for v in H.terminals),
        orientation=_merged_orientation(G, H),
        loops=G.loops or H.loops,
    )


def _check_index(G: TypedGraph, i: int) -> None:
    if not 1 <= i <= G.type:
        raise IndexOutOfRange(f"Terminal index {i} outside 1..{G.type}")


def redefine(G: TypedGraph, sigma: Sequence[int]) -> TypedGraph:
    """New terminal i is old terminal sigma[i-1]"""
    for s in sigma:
        _check_index(G, s)
    return TypedGraph(
        vertices=G.vertices,
        edges=G.edges,
        endpoints=G.endpoints,
        terminals=tuple(G.terminal(s) for s in sigma),
        orientation=G.orientation,
        loops=G.loops,
    )


def fuse(G: TypedGraph, a: int, b: int) -> TypedGraph:
    """Identify terminal b's vertex with terminal a's vertex; t(b) disappears"""
    _check_index(G, a)
    _check_index(G, b)
    keep, drop = G.terminal(a), G.terminal(b)
    if keep == drop:
        return G
    if not G.loops:
        for edge, word in zip(G.edges, G.endpoints):
            if keep in word and drop in word:
                raise LoopCreated(f"Fusing terminals {a} and {b} puts a vertex twice into edge {edge}")
    swap = lambda v: keep if v == drop else v
    return TypedGraph(
        vertices=tuple(v for v in G.vertices if v != drop),
        edges=G.edges,
        endpoints=tuple(tuple(swap(v) for v in word) for word in G.endpoints),
        terminals=tuple(swap(v) for v in G.terminals),
        orientation=G.orientation,
        loops=G.loops,
    )


# Composite operations

def twine_sigma(n: int, m: int, K: Iterable[int], k: int) -> Tuple[int, ...]:
    """Terminal map of a twine: left terminals first, then unfused right leftovers"""
    fused = {l + n for l in K}
    leftovers = [i for i in range(n + 1, n + m + 1) if i not in fused]
    return tuple(i if i <= n else leftovers[i - n - 1] for i in range(1, k + 1))


def twine(G: TypedGraph, H: TypedGraph, K: Iterable[int], k: int) -> TypedGraph:
    """Sum, fuse each l in K with its right copy l+n, then keep k terminals"""
    K = sorted(set(K))
    n, m = G.type, H.type
    for l in K:
        if not 1 <= l <= min(n, m):
            raise IndexOutOfRange(f"Twine index {l} outside 1..{min(n, m)}")
    if k > n + m - len(K):
        raise TypeTooLarge(f"Twine output type {k} exceeds {n + m - len(K)}")
    result = disjoint_sum(G, H)
    for l in K:
        result = fuse(result, l, l + n)
    return redefine(result, twine_sigma(n, m, K, k))


def sprout(G: TypedGraph) -> TypedGraph:
    """Add an isolated vertex as the new last terminal"""
    return disjoint_sum(G, vertex_graph(G.loops))


def bloom(G: TypedGraph, m: int, start: Optional[int] = None) -> TypedGraph:
    """Attach one new edge over terminals 1..m; the type is unchanged"""
    if not 1 <= m <= G.type:
        raise IndexOutOfRange(f"Bloom arity {m} outside 1..{G.type}")
    n = G.type
    result = disjoint_sum(G, edge_graph(m, start=start, loops=G.loops))
    for i in range(1, m + 1):
        result = fuse(result, i, n + i)
    return redefine(result, tuple(range(1, n + 1)))


def collapse(G: TypedGraph, a: int, b: int) -> TypedGraph:
    """Fuse two terminals only if they are adjacent"""
    _check_index(G, a)
    _check_index(G, b)
    if adjacent(G, G.terminal(a), G.terminal(b)):
        return fuse(G, a, b)
    return G


def canonicalize_ids(G: TypedGraph, vertex_prefix: str = "v", edge_prefix: str = "e") -> TypedGraph:
    """Rename vertices and edges to prefix0, prefix1, ... in their stored order"""
    vmap = {v: f"{vertex_prefix}{i}" for i, v in enumerate(G.vertices)}
    emap = {e: f"{edge_prefix}{i}" for i, e in enumerate(G.edges)}
    return TypedGraph(
        vertices=tuple(vmap[v] for v in G.vertices),
        edges=tuple(emap[e] for e in G.edges),
        endpoints=tuple(tuple(vmap[v] for v in word) for word in G.endpoints),
        terminals=tuple(vmap[v] for v in G.terminals),
        orientation=G.orientation,
        loops=G.loops,
    )


# Queries

def _require_vertex(G: TypedGraph, v: str) -> None:
    if v not in G.vertex_position:
        raise UnknownId(f"Unknown vertex {v}")


def _require_edge(G: TypedGraph, e: str) -> None:
    if not G.has_edge_id(e):
        raise UnknownId(f"Unknown edge {e}")


def incidence(G: TypedGraph, v: str, e: str) -> int:
    """How often v occurs in the word of e"""
    _require_vertex(G, v)
    _require_edge(G, e)
    return G.word(e).count(v)


def degree(G: TypedGraph, v: str) -> int:
    _require_vertex(G, v)
    return sum(word.count(v) for word in G.endpoints)


def in_degree(G: TypedGraph, v: str) -> int:
    """Occurrences of v among the head endpoints of directed edges"""
    _require_vertex(G, v)
    if G.orientation is None:
        return degree(G, v)
    return sum(word[:start].count(v) for word, start in zip(G.endpoints, G.orientation))


def out_degree(G: TypedGraph, v: str) -> int:
    """Occurrences of v among the tail endpoints of directed edges"""
    _require_vertex(G, v)
    if G.orientation is None:
        return degree(G, v)
    return sum(word[start:].count(v) for word, start in zip(G.endpoints, G.orientation))


def incident_edges(G: TypedGraph, v: str) -> List[str]:
    _require_vertex(G, v)
    return [e for e, word in zip(G.edges, G.endpoints) if v in word]


def neighbours(G: TypedGraph, v: str) -> Set[str]:
    """Vertices sharing an edge with v; v itself only through a loop"""
    _require_vertex(G, v)
    result: Set[str] = set()
    for word in G.endpoints:
        if v in word:
            counts = Counter(word)
            result.update(u for u in counts if u != v)
            if counts[v] > 1:
                result.add(v)
    return result


def adjacent(G: TypedGraph, u: str, v: str) -> bool:
    _require_vertex(G, u)
    _require_vertex(G, v)
    for word in G.endpoints:
        if u == v:
            if word.count(u) > 1:
                return True
        elif u in word and v in word:
            return True
    return False


def primal_graph(G: TypedGraph) -> nx.Graph:
    """Simple graph on the vertices with a clique over every edge's endpoint set"""
    P = nx.Graph()
    P.add_nodes_from(G.vertices)
    for word in G.endpoints:
        distinct = list(dict.fromkeys(word))
        for i, u in enumerate(distinct):
            for w in distinct[i + 1:]:
                P.add_edge(u, w)
    return P


# Isomorphism

def _incidence_encoding(G: TypedGraph) -> nx.Graph:
    """Bipartite vertex/edge graph whose labels capture terminals and endpoint multiplicities.

    Two typed graphs are isomorphic under endpoint reordering (within head and tail
    parts for directed edges) exactly when these encodings are label-isomorphic.
    """
    B = nx.Graph()
    terminal_slots: Dict[str, List[int]] = {v: [] for v in G.vertices}
    for i, v in enumerate(G.terminals, start=1):
        terminal_slots[v].append(i)
    for v in G.vertices:
        B.add_node(("v", v), label=("vertex", tuple(terminal_slots[v])))
    for index, (e, word) in enumerate(zip(G.edges, G.endpoints)):
        start = G.orientation[index] if G.orientation is not None else len(word)
        B.add_node(("e", e), label=("edge", len(word), start))
        heads, tails = Counter(word[:start]), Counter(word[start:])
        for v in set(word):
            B.add_edge(("e", e), ("v", v), label=(heads[v], tails[v]))
    return B


def is_isomorphic(G: TypedGraph, H: TypedGraph, limit: Optional[int] = None) -> bool:
    """Typed-graph isomorphism for desk-scale graphs"""
    limit = settings.ISOMORPHISM_LIMIT if limit is None else limit
    if max(len(G.vertices), len(H.vertices)) > limit:
        raise SizeLimitExceeded(f"Isomorphism test limited to {limit} vertices")
    if G.type != H.type or G.directed != H.directed:
        return False
    if len(G.vertices) != len(H.vertices) or len(G.edges) != len(H.edges):
        return False
    if sorted(map(len, G.endpoints)) != sorted(map(len, H.endpoints)):
        return False
    same = lambda a, b: a["label"] == b["label"]
    return nx.is_isomorphic(
        _incidence_encoding(G), _incidence_encoding(H),
        node_match=same, edge_match=same,
    )

